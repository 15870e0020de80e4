#ifndef SAM_HEURISTIC_H
#define SAM_HEURISTIC_H

#include "sam/model.h"

#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace sam {

inline constexpr int infinity = std::numeric_limits<int>::max();

// One (action, outcome, precondition DNF branch) triple of the all-outcomes
// determinization.
struct DeterminizedAction {
    ActionId action = -1;
    int outcome = 0;
    int branch = 0;
    PartialAssignment precondition;
    PartialAssignment effect;

    friend bool operator==(const DeterminizedAction &, const DeterminizedAction &) = default;
};

// Entries are ordered by action id, then outcome, then branch.
std::vector<DeterminizedAction> determinize(const PlanningTask &task, const ActionSet &available);

// Flat numbering of all facts of a task.
class FactIndex {
    std::vector<int> offset_;

public:
    explicit FactIndex(const PlanningTask &task);
    int operator()(const Fact &fact) const { return offset_[static_cast<std::size_t>(fact.var)] + fact.value; }
    int size() const { return offset_.back(); }
};

struct RpgResult {
    int level = infinity;
    // layers[i] holds the facts first reached at layer i, so F_i is the union
    // of layers[0..i].
    std::vector<std::vector<Fact>> layers;
    // First layer of each fact (FactIndex order) and each entry; infinity if
    // never reached.
    std::vector<int> fact_level;
    std::vector<int> action_level;

    bool dead_end() const { return level == infinity; }
};

RpgResult build_rpg(const PlanningTask &task, const std::vector<DeterminizedAction> &entries,
                    const State &state);
RpgResult build_rpg(const PlanningTask &task, const SearchState &ss);

struct HeuristicOutcome {
    int value = 0;
    std::vector<DeterminizedAction> relaxed_plan;
    std::vector<ActionId> helpful;

    bool dead_end() const { return value == infinity; }
};

HeuristicOutcome extract_relaxed_plan(const RpgResult &rpg, const PlanningTask &task,
                                      const std::vector<DeterminizedAction> &entries,
                                      const State &state);

enum class HeuristicKind { ff, blind };

std::string to_string(HeuristicKind kind);
HeuristicKind heuristic_from_string(const std::string &name);

class Heuristic {
public:
    virtual ~Heuristic() = default;
    virtual HeuristicOutcome evaluate(const SearchState &ss) = 0;
};

/*
  Caches the determinization for all nondeterministic actions and filters it
  by the availability set on each call; the RPG itself is rebuilt every time.
*/
class FFHeuristic : public Heuristic {
public:
    explicit FFHeuristic(const PlanningTask &task);

    HeuristicOutcome evaluate(const SearchState &ss) override;
    RpgResult rpg(const SearchState &ss);
    const std::vector<DeterminizedAction> &entries() const { return all_entries_; }

private:
    const std::vector<DeterminizedAction> &filtered(const ActionSet &available);

    const PlanningTask &task_;
    std::vector<DeterminizedAction> all_entries_;
    std::vector<DeterminizedAction> scratch_;
};

class BlindHeuristic : public Heuristic {
public:
    explicit BlindHeuristic(const PlanningTask &task) : task_(task) {}
    HeuristicOutcome evaluate(const SearchState &ss) override;

private:
    const PlanningTask &task_;
};

std::unique_ptr<Heuristic> make_heuristic(HeuristicKind kind, const PlanningTask &task);

HeuristicOutcome ff_h(const PlanningTask &task, const SearchState &ss);
HeuristicOutcome blind_h(const PlanningTask &task, const SearchState &ss);

} // namespace sam

#endif
