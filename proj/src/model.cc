#include "sam/model.h"

#include <algorithm>
#include <boost/functional/hash.hpp>
#include <limits>
#include <set>
#include <sstream>

using namespace std;

namespace sam {

PartialAssignment make_assignment(vector<Fact> facts) {
    sort(facts.begin(), facts.end());
    facts.erase(unique(facts.begin(), facts.end()), facts.end());
    for (size_t i = 1; i < facts.size(); ++i) {
        if (facts[i].var == facts[i - 1].var)
            throw ModelError("partial assignment assigns variable " +
                             to_string(facts[i].var) + " twice");
    }
    return facts;
}

Formula Formula::make_atom(Fact fact) {
    Formula f;
    f.kind_ = Kind::atom;
    f.atom_ = fact;
    return f;
}

Formula Formula::make_not(Formula child) {
    Formula f;
    f.kind_ = Kind::negation;
    f.children_.push_back(move(child));
    return f;
}

Formula Formula::make_and(vector<Formula> children) {
    Formula f;
    f.kind_ = Kind::conjunction;
    f.children_ = move(children);
    return f;
}

Formula Formula::make_or(vector<Formula> children) {
    Formula f;
    f.kind_ = Kind::disjunction;
    f.children_ = move(children);
    return f;
}

namespace {
void check_fact(const vector<Variable> &variables, const Fact &fact, const string &where) {
    if (fact.var < 0 || fact.var >= static_cast<int>(variables.size()))
        throw ModelError(where + ": undeclared variable index " + to_string(fact.var));
    if (fact.value >= variables[static_cast<size_t>(fact.var)].domain.size())
        throw ModelError(where + ": value index " + to_string(fact.value) +
                         " outside the domain of " + variables[static_cast<size_t>(fact.var)].name);
}

void check_formula(const vector<Variable> &variables, const Formula &formula, const string &where) {
    if (formula.kind() == Formula::Kind::atom) {
        check_fact(variables, formula.atom(), where);
        return;
    }
    if (formula.kind() == Formula::Kind::negation && formula.children().size() != 1)
        throw ModelError(where + ": negation must have exactly one operand");
    for (const Formula &child : formula.children())
        check_formula(variables, child, where);
}

void check_assignment(const vector<Variable> &variables, const PartialAssignment &facts,
                      const string &where) {
    for (size_t i = 0; i < facts.size(); ++i) {
        check_fact(variables, facts[i], where);
        if (i > 0 && !(facts[i - 1].var < facts[i].var))
            throw ModelError(where + ": partial assignment not sorted or assigns a variable twice");
    }
}
} // namespace

PlanningTask::PlanningTask(vector<Variable> variables, vector<Action> actions, State initial,
                           PartialAssignment goal)
    : variables_(move(variables)),
      actions_(move(actions)),
      initial_(move(initial)),
      goal_(move(goal)) {
    set<string> names;
    for (const Variable &var : variables_) {
        if (var.domain.empty())
            throw ModelError("variable " + var.name + " has an empty domain");
        if (var.domain.size() > numeric_limits<Value>::max())
            throw ModelError("variable " + var.name + " has too many values");
        set<string> values(var.domain.begin(), var.domain.end());
        if (values.size() != var.domain.size())
            throw ModelError("variable " + var.name + " has duplicate domain values");
        if (!names.insert(var.name).second)
            throw ModelError("duplicate variable name " + var.name);
    }
    if (initial_.size() != variables_.size())
        throw ModelError("initial state is not total over the variables");
    for (VarId v = 0; v < num_variables(); ++v)
        check_fact(variables_, Fact{v, initial_[v]}, "initial state");
    check_assignment(variables_, goal_, "goal");

    set<string> action_names;
    for (const Action &action : actions_) {
        const string where = "action '" + action.name + "'";
        if (!action_names.insert(action.name).second)
            throw ModelError("duplicate action " + action.name);
        if (action.outcomes.empty())
            throw ModelError(where + " has no outcomes");
        check_formula(variables_, action.precondition, where);
        for (const PartialAssignment &outcome : action.outcomes)
            check_assignment(variables_, outcome, where);
    }

    nondet_index_.assign(actions_.size(), -1);
    for (ActionId id = 0; id < num_actions(); ++id) {
        if (!actions_[static_cast<size_t>(id)].deterministic()) {
            nondet_index_[static_cast<size_t>(id)] = static_cast<int>(nondet_actions_.size());
            nondet_actions_.push_back(id);
        }
    }
}

VarId PlanningTask::find_variable(const string &name) const {
    for (VarId v = 0; v < num_variables(); ++v)
        if (variables_[static_cast<size_t>(v)].name == name)
            return v;
    return -1;
}

ActionId PlanningTask::find_action(const string &name) const {
    for (ActionId a = 0; a < num_actions(); ++a)
        if (actions_[static_cast<size_t>(a)].name == name)
            return a;
    return -1;
}

int PlanningTask::find_value(VarId var, const string &value) const {
    const auto &domain = variable(var).domain;
    auto it = find(domain.begin(), domain.end(), value);
    return it == domain.end() ? -1 : static_cast<int>(it - domain.begin());
}

string PlanningTask::fact_name(const Fact &fact) const {
    const Variable &var = variable(fact.var);
    return var.name + "=" + var.domain[fact.value];
}

SearchState initial_search_state(const PlanningTask &task) {
    return SearchState{task.initial(), ActionSet(static_cast<size_t>(task.num_nondet()), true)};
}

bool applicable(const PlanningTask &task, const SearchState &ss, ActionId id) {
    int index = task.nondet_index(id);
    if (index >= 0 && !ss.available[static_cast<size_t>(index)])
        return false;
    return eval_formula(ss.state, task.action(id).precondition);
}

ActionTree ActionTree::make_action(ActionId id, vector<ActionTree> children) {
    ActionTree tree(Kind::action);
    tree.action_ = id;
    tree.children_ = move(children);
    return tree;
}

int ActionTree::count_actions() const {
    int n = is_action() ? 1 : 0;
    for (const ActionTree &child : children_)
        n += child.count_actions();
    return n;
}

int ActionTree::count_fail_leaves() const {
    if (kind_ == Kind::fail)
        return 1;
    int n = 0;
    for (const ActionTree &child : children_)
        n += child.count_fail_leaves();
    return n;
}

int ActionTree::count_stop_leaves() const {
    if (kind_ == Kind::stop)
        return 1;
    int n = 0;
    for (const ActionTree &child : children_)
        n += child.count_stop_leaves();
    return n;
}

int ActionTree::depth() const {
    int d = 0;
    for (const ActionTree &child : children_)
        d = max(d, child.depth());
    return is_action() ? d + 1 : d;
}

namespace {
string check_structure(const PlanningTask &task, const ActionTree &tree, vector<bool> &used) {
    if (!tree.is_action())
        return tree.children().empty() ? "" : "leaf node with children";
    if (tree.action() < 0 || tree.action() >= task.num_actions())
        return "unknown action id " + to_string(tree.action());
    const Action &action = task.action(tree.action());
    if (tree.children().size() != action.outcomes.size())
        return "action '" + action.name + "' has " + to_string(tree.children().size()) +
               " children but " + to_string(action.outcomes.size()) + " outcomes";
    int index = task.nondet_index(tree.action());
    if (index >= 0) {
        if (used[static_cast<size_t>(index)])
            return "nondeterministic action '" + action.name + "' repeated on a path";
        used[static_cast<size_t>(index)] = true;
    }
    for (const ActionTree &child : tree.children()) {
        string error = check_structure(task, child, used);
        if (!error.empty())
            return error;
    }
    if (index >= 0)
        used[static_cast<size_t>(index)] = false;
    return "";
}
} // namespace

string check_tree_structure(const PlanningTask &task, const ActionTree &tree) {
    vector<bool> used(static_cast<size_t>(task.num_nondet()), false);
    return check_structure(task, tree, used);
}

State apply_outcome(const State &state, const PartialAssignment &effect) {
    State result = state;
    for (const Fact &fact : effect)
        result.set(fact.var, fact.value);
    return result;
}

State apply_outcome(const PlanningTask &task, const State &state, const PartialAssignment &effect) {
    check_assignment(task.variables(), effect, "effect");
    return apply_outcome(state, effect);
}

bool eval_formula(const State &state, const Formula &formula) {
    switch (formula.kind()) {
    case Formula::Kind::atom:
        return state.holds(formula.atom());
    case Formula::Kind::negation:
        return !eval_formula(state, formula.children().front());
    case Formula::Kind::conjunction:
        return all_of(formula.children().begin(), formula.children().end(),
                      [&](const Formula &child) { return eval_formula(state, child); });
    case Formula::Kind::disjunction:
        return any_of(formula.children().begin(), formula.children().end(),
                      [&](const Formula &child) { return eval_formula(state, child); });
    }
    return false;
}

bool satisfies(const State &state, const PartialAssignment &facts) {
    return all_of(facts.begin(), facts.end(), [&](const Fact &f) { return state.holds(f); });
}

bool goal_satisfied(const State &state, const PartialAssignment &goal) {
    return satisfies(state, goal);
}

namespace {
using Dnf = vector<PartialAssignment>;

// Merges two conjunctions; false if they disagree on a variable.
bool conjoin(const PartialAssignment &lhs, const PartialAssignment &rhs, PartialAssignment &out) {
    out.clear();
    size_t i = 0, j = 0;
    while (i < lhs.size() || j < rhs.size()) {
        if (j == rhs.size() || (i < lhs.size() && lhs[i].var < rhs[j].var)) {
            out.push_back(lhs[i++]);
        } else if (i == lhs.size() || rhs[j].var < lhs[i].var) {
            out.push_back(rhs[j++]);
        } else {
            if (lhs[i].value != rhs[j].value)
                return false;
            out.push_back(lhs[i]);
            ++i;
            ++j;
        }
    }
    return true;
}

void normalize(Dnf &dnf) {
    sort(dnf.begin(), dnf.end());
    dnf.erase(unique(dnf.begin(), dnf.end()), dnf.end());
}

class DnfBuilder {
    const vector<Variable> &variables_;
    size_t limit_;

    void guard(const Dnf &dnf) const {
        if (dnf.size() > limit_)
            throw DnfSizeError("DNF exceeds " + to_string(limit_) + " conjunctions");
    }

public:
    DnfBuilder(const vector<Variable> &variables, size_t limit)
        : variables_(variables), limit_(limit) {}

    Dnf build(const Formula &formula, bool negated) const {
        switch (formula.kind()) {
        case Formula::Kind::atom: {
            const Fact &fact = formula.atom();
            if (!negated)
                return {{fact}};
            Dnf result;
            int size = variables_[static_cast<size_t>(fact.var)].domain_size();
            for (int c = 0; c < size; ++c)
                if (c != fact.value)
                    result.push_back({Fact{fact.var, static_cast<Value>(c)}});
            return result;
        }
        case Formula::Kind::negation:
            return build(formula.children().front(), !negated);
        case Formula::Kind::conjunction:
        case Formula::Kind::disjunction: {
            bool is_and = (formula.kind() == Formula::Kind::conjunction) != negated;
            if (!is_and) {
                Dnf result;
                for (const Formula &child : formula.children()) {
                    Dnf part = build(child, negated);
                    result.insert(result.end(), part.begin(), part.end());
                    normalize(result);
                    guard(result);
                }
                return result;
            }
            Dnf result{{}};
            PartialAssignment merged;
            for (const Formula &child : formula.children()) {
                Dnf part = build(child, negated);
                Dnf next;
                for (const PartialAssignment &lhs : result)
                    for (const PartialAssignment &rhs : part)
                        if (conjoin(lhs, rhs, merged))
                            next.push_back(merged);
                normalize(next);
                guard(next);
                result = move(next);
                if (result.empty())
                    break;
            }
            return result;
        }
        }
        return {};
    }
};
} // namespace

vector<PartialAssignment> formula_to_dnf(const vector<Variable> &variables, const Formula &formula,
                                         size_t limit) {
    check_formula(variables, formula, "formula");
    return DnfBuilder(variables, limit).build(formula, false);
}

vector<PartialAssignment> formula_to_dnf(const PlanningTask &task, const Formula &formula,
                                         size_t limit) {
    return formula_to_dnf(task.variables(), formula, limit);
}

Formula dnf_to_formula(const vector<PartialAssignment> &dnf) {
    vector<Formula> disjuncts;
    for (const PartialAssignment &conj : dnf) {
        vector<Formula> atoms;
        for (const Fact &fact : conj)
            atoms.push_back(Formula::make_atom(fact));
        disjuncts.push_back(Formula::make_and(move(atoms)));
    }
    return Formula::make_or(move(disjuncts));
}

namespace {
void collect_variables(const Formula &formula, vector<VarId> &out) {
    if (formula.kind() == Formula::Kind::atom)
        out.push_back(formula.atom().var);
    for (const Formula &child : formula.children())
        collect_variables(child, out);
}
} // namespace

vector<VarId> formula_variables(const Formula &formula) {
    vector<VarId> vars;
    collect_variables(formula, vars);
    sort(vars.begin(), vars.end());
    vars.erase(unique(vars.begin(), vars.end()), vars.end());
    return vars;
}

string render(const PlanningTask &task, const Formula &formula) {
    switch (formula.kind()) {
    case Formula::Kind::atom:
        return task.fact_name(formula.atom());
    case Formula::Kind::negation:
        return "not " + render(task, formula.children().front());
    case Formula::Kind::conjunction:
    case Formula::Kind::disjunction: {
        if (formula.children().empty())
            return formula.kind() == Formula::Kind::conjunction ? "true" : "false";
        const char *op = formula.kind() == Formula::Kind::conjunction ? " and " : " or ";
        ostringstream out;
        out << "(";
        for (size_t i = 0; i < formula.children().size(); ++i)
            out << (i ? op : "") << render(task, formula.children()[i]);
        out << ")";
        return out.str();
    }
    }
    return "";
}

string render(const PlanningTask &task, const PartialAssignment &facts) {
    string out;
    for (const Fact &fact : facts) {
        if (!out.empty())
            out += ", ";
        out += task.fact_name(fact);
    }
    return out;
}

size_t StateHash::operator()(const State &state) const {
    return boost::hash_range(state.values().begin(), state.values().end());
}

size_t SearchStateHash::operator()(const SearchState &ss) const {
    size_t seed = StateHash()(ss.state);
    boost::hash_combine(seed, hash<vector<bool>>()(ss.available));
    return seed;
}

} // namespace sam
