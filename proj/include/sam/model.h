#ifndef SAM_MODEL_H
#define SAM_MODEL_H

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace sam {

using VarId = int;
using ActionId = int;
using Value = std::uint16_t;

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DnfSizeError : public ModelError {
public:
    using ModelError::ModelError;
};

struct Fact {
    VarId var = 0;
    Value value = 0;

    friend auto operator<=>(const Fact &, const Fact &) = default;
};

/*
  A partial variable assignment: facts sorted by variable, at most one fact
  per variable. Preconditions in DNF branches, outcomes and goals all use it.
*/
using PartialAssignment = std::vector<Fact>;

// Sorts and checks for duplicate variables; throws ModelError on conflicts.
PartialAssignment make_assignment(std::vector<Fact> facts);

struct Variable {
    std::string name;
    std::vector<std::string> domain;
    // Business object the variable belongs to; empty for tasks from PDDL.
    std::string owner;

    int domain_size() const { return static_cast<int>(domain.size()); }
    friend bool operator==(const Variable &, const Variable &) = default;
};

class State {
    std::vector<Value> values_;

public:
    State() = default;
    explicit State(std::vector<Value> values) : values_(std::move(values)) {}

    Value operator[](VarId var) const { return values_[static_cast<std::size_t>(var)]; }
    std::size_t size() const { return values_.size(); }
    const std::vector<Value> &values() const { return values_; }
    bool holds(const Fact &fact) const { return (*this)[fact.var] == fact.value; }
    void set(VarId var, Value value) { values_[static_cast<std::size_t>(var)] = value; }

    friend bool operator==(const State &, const State &) = default;
};

class Formula {
public:
    enum class Kind { atom, negation, conjunction, disjunction };

    static Formula make_atom(Fact fact);
    static Formula make_not(Formula child);
    static Formula make_and(std::vector<Formula> children);
    static Formula make_or(std::vector<Formula> children);
    static Formula top() { return make_and({}); }
    static Formula bottom() { return make_or({}); }

    Kind kind() const { return kind_; }
    const Fact &atom() const { return atom_; }
    const std::vector<Formula> &children() const { return children_; }

    friend bool operator==(const Formula &, const Formula &) = default;

private:
    Kind kind_ = Kind::conjunction;
    Fact atom_;
    std::vector<Formula> children_;
};

struct Action {
    std::string name;
    Formula precondition;
    std::vector<PartialAssignment> outcomes;
    std::string owner;

    bool deterministic() const { return outcomes.size() == 1; }
    friend bool operator==(const Action &, const Action &) = default;
};

/*
  Finite-domain task with nondeterministic actions. Immutable after
  construction; the constructor validates all invariants and builds the index
  of nondeterministic actions used by availability sets.
*/
class PlanningTask {
public:
    PlanningTask() = default;
    PlanningTask(std::vector<Variable> variables, std::vector<Action> actions,
                 State initial, PartialAssignment goal);

    const std::vector<Variable> &variables() const { return variables_; }
    const std::vector<Action> &actions() const { return actions_; }
    const State &initial() const { return initial_; }
    const PartialAssignment &goal() const { return goal_; }

    int num_variables() const { return static_cast<int>(variables_.size()); }
    int num_actions() const { return static_cast<int>(actions_.size()); }
    const Variable &variable(VarId var) const { return variables_[static_cast<std::size_t>(var)]; }
    const Action &action(ActionId id) const { return actions_[static_cast<std::size_t>(id)]; }

    // Position of a nondeterministic action in availability sets, -1 otherwise.
    int nondet_index(ActionId id) const { return nondet_index_[static_cast<std::size_t>(id)]; }
    const std::vector<ActionId> &nondet_actions() const { return nondet_actions_; }
    int num_nondet() const { return static_cast<int>(nondet_actions_.size()); }

    // Lookup by display name; -1 if absent.
    VarId find_variable(const std::string &name) const;
    ActionId find_action(const std::string &name) const;
    int find_value(VarId var, const std::string &value) const;

    std::string fact_name(const Fact &fact) const;

    friend bool operator==(const PlanningTask &lhs, const PlanningTask &rhs) {
        return lhs.variables_ == rhs.variables_ && lhs.actions_ == rhs.actions_ &&
               lhs.initial_ == rhs.initial_ && lhs.goal_ == rhs.goal_;
    }

private:
    std::vector<Variable> variables_;
    std::vector<Action> actions_;
    State initial_;
    PartialAssignment goal_;
    std::vector<int> nondet_index_;
    std::vector<ActionId> nondet_actions_;
};

// Set of still-available nondeterministic actions, indexed by nondet_index.
using ActionSet = std::vector<bool>;

struct SearchState {
    State state;
    ActionSet available;

    friend bool operator==(const SearchState &, const SearchState &) = default;
};

SearchState initial_search_state(const PlanningTask &task);

// Applicable means precondition holds and, if nondeterministic, available.
bool applicable(const PlanningTask &task, const SearchState &ss, ActionId id);

/*
  Plan trees. An action node has exactly one child per outcome of its action;
  leaves are STOP (goal reached) or FAIL (provably unsolvable outcome).
*/
class ActionTree {
public:
    enum class Kind { action, stop, fail };

    static ActionTree stop() { return ActionTree(Kind::stop); }
    static ActionTree fail() { return ActionTree(Kind::fail); }
    static ActionTree make_action(ActionId id, std::vector<ActionTree> children);

    Kind kind() const { return kind_; }
    bool is_action() const { return kind_ == Kind::action; }
    ActionId action() const { return action_; }
    const std::vector<ActionTree> &children() const { return children_; }

    int count_actions() const;
    int count_fail_leaves() const;
    int count_stop_leaves() const;
    int depth() const;

    friend bool operator==(const ActionTree &, const ActionTree &) = default;

private:
    explicit ActionTree(Kind kind) : kind_(kind) {}

    Kind kind_ = Kind::stop;
    ActionId action_ = -1;
    std::vector<ActionTree> children_;
};

// Arity and repeated-nondeterministic-action checks; empty string if fine.
std::string check_tree_structure(const PlanningTask &task, const ActionTree &tree);

State apply_outcome(const State &state, const PartialAssignment &effect);
// Variant that validates the effect against the task first.
State apply_outcome(const PlanningTask &task, const State &state,
                    const PartialAssignment &effect);

bool eval_formula(const State &state, const Formula &formula);
bool goal_satisfied(const State &state, const PartialAssignment &goal);
bool satisfies(const State &state, const PartialAssignment &facts);

inline constexpr std::size_t default_dnf_limit = 4096;

/*
  Compilation into a disjunction of positive fact
  conjunctions. Negated atoms expand over the remaining domain values.
  Contradictory conjunctions are dropped and duplicates removed; no other
  minimization happens.
*/
std::vector<PartialAssignment> formula_to_dnf(const PlanningTask &task, const Formula &formula,
                                              std::size_t limit = default_dnf_limit);
std::vector<PartialAssignment> formula_to_dnf(const std::vector<Variable> &variables,
                                              const Formula &formula,
                                              std::size_t limit = default_dnf_limit);

Formula dnf_to_formula(const std::vector<PartialAssignment> &dnf);

// Variables mentioned anywhere in the formula, sorted and unique.
std::vector<VarId> formula_variables(const Formula &formula);

std::string render(const PlanningTask &task, const Formula &formula);
std::string render(const PlanningTask &task, const PartialAssignment &facts);

struct StateHash {
    std::size_t operator()(const State &state) const;
};

struct SearchStateHash {
    std::size_t operator()(const SearchState &ss) const;
};

} // namespace sam

#endif
