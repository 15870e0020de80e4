#ifndef SAM_TESTS_SUPPORT_H
#define SAM_TESTS_SUPPORT_H

#include "sam/model.h"
#include "sam/task_io.h"

#include <string>
#include <utility>
#include <vector>

namespace sam::testing {

inline std::string data_path(const std::string &name) { return std::string(SAM_TEST_DATA) + "/" + name; }

inline std::vector<BusinessObject> cq_objects() { return objects_from_json(read_json_file(data_path("cq.json"))); }

inline PlanningTask cq_task() { return read_task(data_path("cq_task.json")); }

inline Fact fact(const PlanningTask &task, const std::string &var, const std::string &value) {
    VarId v = task.find_variable(var);
    if (v < 0)
        throw std::invalid_argument("no variable " + var);
    int c = task.find_value(v, value);
    if (c < 0)
        throw std::invalid_argument("no value " + value);
    return Fact{v, static_cast<Value>(c)};
}

inline ActionId action_id(const PlanningTask &task, const std::string &name) {
    ActionId id = task.find_action(name);
    if (id < 0)
        throw std::invalid_argument("no action " + name);
    return id;
}

// Search state from the initial state with some values changed and some
// nondeterministic actions consumed.
inline SearchState search_state(const PlanningTask &task,
                                const std::vector<std::pair<std::string, std::string>> &values,
                                const std::vector<std::string> &consumed = {}) {
    SearchState ss = initial_search_state(task);
    for (const auto &[var, value] : values) {
        Fact f = fact(task, var, value);
        ss.state.set(f.var, f.value);
    }
    for (const std::string &name : consumed)
        ss.available[static_cast<std::size_t>(task.nondet_index(action_id(task, name)))] = false;
    return ss;
}

inline Formula atom(Fact f) { return Formula::make_atom(f); }

// x in {A, B}, starts at A, goal B; one action "a" with outcomes A and B.
inline PlanningTask repeat_outcome_task() {
    std::vector<Variable> vars{{"x", {"A", "B"}, ""}};
    Action a{"a", Formula::top(), {{Fact{0, 0}}, {Fact{0, 1}}}, ""};
    return PlanningTask(vars, {a}, State({0}), {Fact{0, 1}});
}

// x in {A, B, C}, starts at A, goal C. a1 (pre A) leads to B or C, a2 (pre B)
// returns to A, a3 (pre A) reaches C.
inline PlanningTask detour_task() {
    std::vector<Variable> vars{{"x", {"A", "B", "C"}, ""}};
    Fact A{0, 0}, B{0, 1}, C{0, 2};
    std::vector<Action> actions{
        {"a1", atom(A), {{B}, {C}}, ""},
        {"a2", atom(B), {{A}}, ""},
        {"a3", atom(A), {{C}}, ""},
    };
    return PlanningTask(vars, actions, State({0}), {C});
}

// The CQ object with goal complete and consistent.
inline PlanningTask cq_checks_task() {
    ProblemBundle bundle;
    bundle.objects = cq_objects();
    bundle.goal = {{"CQ.completeness", "complete", false}, {"CQ.consistency", "consistent", false}};
    return compile_bo(bundle);
}

} // namespace sam::testing

#endif
