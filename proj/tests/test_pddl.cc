#include "support.h"

#include "sam/experiments.h"
#include "sam/pddl.h"
#include "sam/search.h"

#include <doctest.h>

#include <random>

using namespace sam;
using namespace sam::testing;

namespace {

// Action names as print_pddl writes them.
PlanningTask pddl_names(const PlanningTask &task) {
    std::vector<Action> actions = task.actions();
    for (Action &a : actions)
        a.name = pddl_action_name(a.name);
    return PlanningTask(task.variables(), actions, task.initial(), task.goal());
}

PddlError parse_error(const std::string &domain, const std::string &problem) {
    try {
        parse_pddl(domain, problem);
    } catch (const PddlError &e) {
        return e;
    }
    return PddlError(0, 0, "no error");
}

const char *switch_problem = R"(
(define (problem p) (:domain d)
  (:init (p))
  (:goal (q)))
)";

std::string effect_domain(const std::string &effect) {
    return "(define (domain d) (:predicates (p) (q))\n"
           "  (:action a :parameters () :precondition (p)\n"
           "   :effect " +
           effect + "))";
}

} // namespace

TEST_CASE("one deterministic STRIPS action") {
    PlanningTask task = parse_pddl(effect_domain("(q)"), switch_problem);
    CHECK(task.num_actions() == 1);
    CHECK(task.action(0).deterministic());
    CHECK(task.num_variables() == 2);
    CHECK(task.variable(0).domain == std::vector<std::string>{"false", "true"});
    SearchResult r = solve(task, SearchConfig{});
    REQUIRE(r.verdict == Verdict::plan);
    CHECK(r.tree->count_actions() == 1);
    CHECK(r.tree->depth() == 1);
}

TEST_CASE("oneof becomes outcomes") {
    const char *domain = R"(
(define (domain d) (:requirements :strips :non-deterministic)
  (:predicates (x_A) (x_B))
  (:action a :parameters () :precondition (and)
   :effect (oneof (and (x_A)) (and (x_B)))))
)";
    const char *problem = "(define (problem p) (:domain d) (:init) (:goal (x_B)))";
    PlanningTask task = parse_pddl(domain, problem);
    REQUIRE(task.num_actions() == 1);
    CHECK(task.action(0).outcomes.size() == 2);
    CHECK(task.num_nondet() == 1);
}

TEST_CASE("negative effects assign false") {
    PlanningTask task = parse_pddl(effect_domain("(and (q) (not (p)))"), switch_problem);
    VarId p = task.find_variable("p");
    VarId q = task.find_variable("q");
    State s = apply_outcome(task.initial(), task.action(0).outcomes[0]);
    CHECK(task.variable(p).domain[s[p]] == "false");
    CHECK(task.variable(q).domain[s[q]] == "true");
}

TEST_CASE("typed schemas are grounded exhaustively") {
    const char *domain = R"(
(define (domain rooms)
  (:requirements :strips :typing :equality :negative-preconditions :disjunctive-preconditions)
  (:types room)
  (:predicates (at ?r - room) (open ?r - room) (visited ?r - room))
  (:action move
    :parameters (?from ?to - room)
    :precondition (and (at ?from) (not (= ?from ?to)) (or (open ?to) (imply (visited ?to) (open ?from))))
    :effect (and (at ?to) (visited ?to) (not (at ?from))))
  (:action toggle
    :parameters (?r - room)
    :precondition (at ?r)
    :effect (oneof (open ?r) (not (open ?r)))))
)";
    const char *problem = R"(
(define (problem two) (:domain rooms)
  (:objects kitchen hall cellar - room)
  (:init (at kitchen))
  (:goal (and (visited cellar) (not (at kitchen)))))
)";
    PlanningTask task = parse_pddl(domain, problem);
    // move: 3 * 3 substitutions, all kept (equality is part of the precondition).
    CHECK(task.num_actions() == 9 + 3);
    ActionId m = task.find_action("move kitchen cellar");
    REQUIRE(m >= 0);
    CHECK(task.find_action("toggle hall") >= 0);
    CHECK(task.find_variable("at_kitchen") >= 0);
    CHECK(applicable(task, initial_search_state(task), m));
    CHECK_FALSE(applicable(task, initial_search_state(task), task.find_action("move kitchen kitchen")));
    SearchResult r = solve(task, SearchConfig{});
    CHECK(r.verdict == Verdict::plan);
    CHECK(validate_plan(task, *r.tree, Mode::weak).valid);
}

TEST_CASE("CQ fixture matches the native compilation") {
    PlanningTask from_pddl =
        parse_pddl(read_text_file(data_path("cq_domain.pddl")), read_text_file(data_path("cq_problem.pddl")));
    PlanningTask native = cq_task();
    CHECK(from_pddl == pddl_names(native));
    CHECK(from_pddl.variable(3).owner == "CQ");
    CHECK(from_pddl.variable(3).domain.size() == 5);
}

TEST_CASE("print then parse is the identity on random tasks") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 300; ++i) {
        PlanningTask task = random_task(rng);
        PddlFiles files = print_pddl(task);
        PlanningTask back = parse_pddl(files.domain, files.problem);
        REQUIRE(back == pddl_names(task));
    }
}

TEST_CASE("syntax errors report line and column") {
    PddlError e = parse_error("(define (domain d)\n  (:predicates (p)\n", switch_problem);
    // The innermost unclosed list.
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);

    e = parse_error("(define (domain d) (:predicates (p) (q)))\n)", switch_problem);
    CHECK(e.line() == 2);
    CHECK(e.column() == 1);

    e = parse_error(effect_domain("(r)"), switch_problem);
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("undeclared predicate 'r'") != std::string::npos);
}

TEST_CASE("unsupported constructs are named") {
    auto message = [](const std::string &effect) { return std::string(parse_error(effect_domain(effect), switch_problem).what()); };
    CHECK(message("(when (p) (q))").find("when") != std::string::npos);
    CHECK(message("(forall (?x) (q))").find("forall") != std::string::npos);
    CHECK(message("(increase (total-cost) 1)").find("numeric") != std::string::npos);
    CHECK(message("(oneof (q) (oneof (p) (q)))").find("oneof") != std::string::npos);
    CHECK(message("(and (oneof (q) (p)) (oneof (p) (q)))").find("oneof") != std::string::npos);

    std::string functions = "(define (domain d) (:predicates (p) (q)) (:functions (cost)))";
    CHECK(std::string(parse_error(functions, switch_problem).what()).find(":functions") != std::string::npos);
}

TEST_CASE("finite-domain families need exactly-one behaviour") {
    // An add without deleting the sibling keeps the atoms binary.
    const char *domain = R"(
(define (domain d) (:predicates (v:a) (v:b))
  (:action go :parameters () :precondition (v:a) :effect (and (v:b))))
)";
    const char *problem = "(define (problem p) (:domain d) (:init (v:a)) (:goal (v:b)))";
    PlanningTask task = parse_pddl(domain, problem);
    CHECK(task.num_variables() == 2);

    const char *recovered = R"(
(define (domain d) (:predicates (v:a) (v:b))
  (:action go :parameters () :precondition (v:a) :effect (and (v:b) (not (v:a)))))
)";
    PlanningTask fd = parse_pddl(recovered, problem);
    CHECK(fd.num_variables() == 1);
    CHECK(fd.variable(0).name == "v");
    CHECK(fd.variable(0).domain == std::vector<std::string>{"a", "b"});
}
