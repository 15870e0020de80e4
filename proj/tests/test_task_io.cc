#include "support.h"

#include "sam/experiments.h"
#include "sam/search.h"

#include <doctest.h>

#include <filesystem>
#include <random>

using namespace sam;
using namespace sam::testing;
using json = nlohmann::json;

namespace {

BusinessObject tiny_object(const std::string &id) {
    json doc = json::parse(R"({"objects":[{"id":"X","name":"Tiny","variables":[
        {"name":"s","domain":["off","on"],"initial":"off"}],
        "actions":[{"name":"Switch","pre":{"var":"s","val":"off"},"eff":[[{"var":"s","val":"on"}]]}]}]})");
    return rename_object(objects_from_json(doc).front(), id);
}

std::string schema_error_path(const json &doc) {
    try {
        objects_from_json(doc);
    } catch (const SchemaError &e) {
        return e.path();
    }
    return "";
}

} // namespace

TEST_CASE("compile_bo on the CQ object") {
    ProblemBundle bundle = bundle_from_json(read_json_file(data_path("cq_task.json")));
    PlanningTask task = compile_bo(bundle);
    CHECK(task.num_variables() == 7);
    int det = 0, nondet = 0;
    for (const Action &a : task.actions()) {
        if (a.deterministic())
            ++det;
        else if (a.outcomes.size() == 2)
            ++nondet;
    }
    CHECK(det == 4);
    CHECK(nondet == 4);
    CHECK(task.variable(0).name == "CQ.archiving");
    CHECK(task.variable(0).owner == "CQ");
    CHECK(task.goal().size() == 2);
}

TEST_CASE("goal already true needs no actions") {
    json doc = json::parse(R"({"objects":[{"id":"E","name":"Empty","variables":[
        {"name":"s","domain":["a","b"],"initial":"a"}],"actions":[]}],
        "goal":[{"var":"E.s","val":"a"}]})");
    PlanningTask task = compile_bo(bundle_from_json(doc));
    CHECK(task.num_actions() == 0);
    SearchResult r = solve(task, SearchConfig{});
    REQUIRE(r.verdict == Verdict::plan);
    CHECK(r.tree->kind() == ActionTree::Kind::stop);
}

TEST_CASE("action scope") {
    std::vector<BusinessObject> objects{tiny_object("A"), tiny_object("B")};
    std::vector<NamedAtom> goal{{"A.s", "on", false}};
    PlanningTask relevant = compile_bo(objects, goal, {}, ActionScope::bo_relevant);
    PlanningTask full = compile_bo(objects, goal, {}, ActionScope::full);
    CHECK(relevant.num_actions() == 1);
    CHECK(relevant.action(0).owner == "A");
    CHECK(full.num_actions() == 2);
    // Colliding action names are qualified by the object id in every scope.
    CHECK(full.find_action("A: Switch") >= 0);
    CHECK(full.find_action("B: Switch") >= 0);
    CHECK(relevant.find_action("A: Switch") >= 0);
}

TEST_CASE("scope subset and same weak answer for single-object goals") {
    std::vector<BusinessObject> objects = cq_objects();
    objects.push_back(rename_object(objects[0], "CQ2"));
    GeneratorSpec spec;
    spec.objects = {"CQ"};
    spec.goal_size = 2;
    spec.samples = 0;
    for (const GeneratedInstance &g : generate(objects, spec)) {
        PlanningTask relevant = compile_bo(objects, g.bundle.goal, {}, ActionScope::bo_relevant);
        PlanningTask full = compile_bo(objects, g.bundle.goal, {}, ActionScope::full);
        for (const Action &a : relevant.actions())
            CHECK(full.find_action(a.name) >= 0);
        CHECK(oracle_solvable(relevant, initial_search_state(relevant), Mode::weak) ==
              oracle_solvable(full, initial_search_state(full), Mode::weak));
    }
}

TEST_CASE("semantic errors") {
    std::vector<BusinessObject> objects = cq_objects();
    CHECK_THROWS_AS(compile_bo(objects, {{"CQ.nothing", "x", false}}, {}, ActionScope::full), ModelError);
    CHECK_THROWS_AS(compile_bo(objects, {{"CQ.archiving", "lost", false}}, {}, ActionScope::full), ModelError);
    CHECK_THROWS_AS(compile_bo(objects, {{"CQ.archiving", "archived", false}, {"CQ.archiving", "notArchived", false}},
                               {}, ActionScope::full),
                    ModelError);
    CHECK_THROWS_AS(compile_bo({objects[0], objects[0]}, {}, {}, ActionScope::full), ModelError);
    CHECK_THROWS_AS(compile_bo(objects, {}, {{"CQ.none", "", true}}, ActionScope::full), ModelError);
}

TEST_CASE("duplicate outcome disjuncts are merged with a warning") {
    json doc = json::parse(R"({"objects":[{"id":"D","name":"Dup","variables":[
        {"name":"s","domain":["a","b"],"initial":"a"}],
        "actions":[{"name":"Go","pre":{"and":[]},"eff":[[{"var":"s","val":"b"}],[{"var":"s","val":"b"}]]}]}]})");
    std::vector<std::string> warnings;
    PlanningTask task = compile_bo(objects_from_json(doc), {}, {}, ActionScope::full, &warnings);
    CHECK(task.action(0).outcomes.size() == 1);
    CHECK(warnings.size() == 1);
}

TEST_CASE("unset initial values make atoms on the variable false") {
    std::vector<BusinessObject> objects = cq_objects();
    std::vector<NamedAtom> goal{{"CQ.followUp", "documentCreated", false}, {"CQ.archiving", "archived", false}};
    PlanningTask task = compile_bo(objects, goal, {{"CQ.approval", "", true}}, ActionScope::full);
    VarId appr = task.find_variable("CQ.approval");
    CHECK(task.variable(appr).domain.back() == unset_value);
    CHECK(task.initial()[appr] == task.variable(appr).domain_size() - 1);
    CHECK_FALSE(applicable(task, initial_search_state(task), action_id(task, "Check CQ Approval Status")));
    CHECK(solve(task, SearchConfig{}).verdict != Verdict::plan);
    CHECK_FALSE(oracle_solvable(task, initial_search_state(task), Mode::weak));

    PlanningTask overridden =
        compile_bo(objects, goal, {{"CQ.approval", "notNecessary", false}}, ActionScope::full);
    CHECK(overridden.initial()[appr] == overridden.find_value(appr, "notNecessary"));
    CHECK_THROWS_AS(compile_bo(objects, {{"CQ.approval", unset_value, false}}, {}, ActionScope::full), ModelError);
}

TEST_CASE("native task round-trip") {
    PlanningTask task = cq_task();
    auto path = std::filesystem::temp_directory_path() / "samplan_roundtrip.json";
    write_task(task, path);
    CHECK(read_task(path) == task);
    std::filesystem::remove(path);

    json empty = json::parse(R"({"objects":[{"id":"E","name":"","variables":[
        {"name":"s","domain":["a"],"initial":"a"}],"actions":[]}],"goal":[]})");
    PlanningTask t = compile_bo(bundle_from_json(empty));
    CHECK(task_from_json(task_to_json(t)) == t);
}

TEST_CASE("round-trip of random business objects") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        PlanningTask random = random_task(rng);
        // random tasks have no owners; give all variables one owner.
        std::vector<Variable> vars = random.variables();
        for (Variable &v : vars) {
            v.name = "R." + v.name;
            v.owner = "R";
        }
        std::vector<Action> actions = random.actions();
        for (Action &a : actions)
            a.owner = "R";
        PlanningTask owned(vars, actions, random.initial(), random.goal());
        CHECK(task_from_json(task_to_json(owned)) == owned);
    }
}

TEST_CASE("schema errors carry field paths") {
    json doc = read_json_file(data_path("cq.json"));
    json extra = doc;
    extra["bogus"] = 1;
    CHECK(schema_error_path(extra) == "$.bogus");

    json bad_var = doc;
    bad_var["objects"][0]["variables"][2]["color"] = "red";
    CHECK(schema_error_path(bad_var) == "$.objects[0].variables[2].color");

    json bad_initial = doc;
    bad_initial["objects"][0]["variables"][0]["initial"] = "maybe";
    CHECK(schema_error_path(bad_initial) == "$.objects[0].variables[0].initial");

    json bad_pre = doc;
    bad_pre["objects"][0]["actions"][1]["pre"] = json{{"var", "nope"}, {"val", "x"}};
    CHECK(schema_error_path(bad_pre) == "$.objects[0].actions[1].pre.var");

    json contradictory = doc;
    contradictory["objects"][0]["actions"][0]["eff"][0].push_back(json{{"var", "completeness"}, {"val", "notComplete"}});
    CHECK(schema_error_path(contradictory).starts_with("$.objects[0].actions[0].eff[0]"));

    json task = read_json_file(data_path("cq_task.json"));
    task["goals"] = json::array();
    CHECK_THROWS_AS(bundle_from_json(task), SchemaError);

    json problem = read_json_file(data_path("cq_problem.json"));
    problem["scope"] = "some";
    ProblemBundle bundle;
    CHECK_THROWS_AS(problem_from_json(problem, bundle), SchemaError);
}

TEST_CASE("objects plus problem equals the merged bundle") {
    ProblemBundle bundle;
    bundle.objects = cq_objects();
    problem_from_json(read_json_file(data_path("cq_problem.json")), bundle);
    CHECK(compile_bo(bundle) == cq_task());
    json again = problem_to_json(bundle);
    ProblemBundle copy;
    copy.objects = bundle.objects;
    problem_from_json(again, copy);
    CHECK(compile_bo(copy) == compile_bo(bundle));
}

TEST_CASE("plan json round-trip") {
    PlanningTask task = cq_task();
    json doc = read_json_file(data_path("cq_weak_plan.json"));
    ActionTree tree = plan_from_json(task, doc);
    CHECK(tree.count_fail_leaves() == 3);
    CHECK(plan_to_json(task, tree) == doc);
    CHECK_THROWS_AS(plan_from_json(task, json{{"action", "Dance"}, {"children", json::array()}}), SchemaError);
    CHECK_THROWS_AS(plan_from_json(task, "MAYBE"), SchemaError);
}
