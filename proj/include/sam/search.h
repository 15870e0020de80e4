#ifndef SAM_SEARCH_H
#define SAM_SEARCH_H

#include "sam/heuristic.h"
#include "sam/model.h"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sam {

enum class Mode { strong, weak, auto_ };
enum class Status { unknown, solved, failed };
enum class Verdict { plan, unsolvable, exhausted_unknown, resource_limit };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string &name);
std::string to_string(Status status);
std::string to_string(Verdict verdict);

struct SearchConfig {
    Mode mode = Mode::weak;
    HeuristicKind heuristic = HeuristicKind::ff;
    double weight = 5.0;
    bool helpful_pruning = true;
    // 0 means unlimited.
    long max_evaluations = 0;
    double time_budget = 60.0;
    double strong_phase_budget = 0.5;
    int depth_ceiling = 100000;
};

struct SearchStatistics {
    long evaluations = 0;
    long expansions = 0;
    long generated = 0;
    int max_depth = 0;
    double wall_time = 0.0;
    int failed_leaves = 0;
    // Helpful-actions pruning removed at least one applicable action.
    bool pruned = false;
    // A FAIL leaf could not be certified and the search was repeated
    // without pruning.
    bool reran_without_pruning = false;
};

struct SearchResult {
    Verdict verdict = Verdict::resource_limit;
    std::optional<ActionTree> tree;
    Mode plan_mode = Mode::weak;
    SearchStatistics stats;
    // Filled in auto mode.
    std::optional<Verdict> strong_phase;
    SearchStatistics strong_stats;
};

// Thrown when a node exceeds SearchConfig::depth_ceiling.
class SearchInvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

Status sam_aggregate(const std::vector<Status> &children);
Status and_aggregate(const std::vector<Status> &children);
Status or_aggregate(const std::vector<Status> &children);

// f of an action node over its children's statuses and f-values.
double and_node_f(const std::vector<Status> &statuses, const std::vector<double> &f);

/*
  AND-OR tree search: AO* in strong mode, SAM-AO* in weak mode. Or-nodes
  carry search states, and-nodes actions. Duplicates are pruned only for
  deterministic successors that repeat an ancestor's search state.
*/
class AndOrSearch {
public:
    AndOrSearch(const PlanningTask &task, Mode mode, const SearchConfig &config);

    SearchResult run(const SearchState &root);

    // Node arena, exposed for tests.
    struct Node {
        bool is_or = true;
        int parent = -1;
        int depth = 0;
        Status status = Status::unknown;
        double f = 0.0;
        int best = -1;
        std::vector<int> children;
        // or-nodes
        SearchState content;
        bool expanded = false;
        std::vector<ActionId> helpful;
        int h = 0;
        // and-nodes
        ActionId action = -1;
    };

    const std::vector<Node> &nodes() const { return nodes_; }
    bool is_direct_duplicate(int or_node, const SearchState &candidate) const;
    int add_or_node(int parent, SearchState content);
    void expand(int or_node);
    int select_open_node() const;
    void update(int node);
    ActionTree extract_plan(int or_node) const;

private:
    void evaluate(int or_node);
    void propagate(int node);

    const PlanningTask &task_;
    Mode mode_;
    SearchConfig config_;
    std::unique_ptr<Heuristic> heuristic_;
    std::vector<Node> nodes_;
    SearchStatistics stats_;
};

SearchResult solve(const PlanningTask &task, const SearchConfig &config);
SearchResult solve_from(const PlanningTask &task, const SearchState &root, const SearchConfig &config);

// Decides whether a FAIL leaf's search state is unsolvable.
using FailCertifier = std::function<bool(const SearchState &)>;

FailCertifier rpg_certifier(const PlanningTask &task);
// RPG first, then a weak search without pruning.
FailCertifier search_certifier(const PlanningTask &task, double time_budget = 10.0);

struct ValidationReport {
    bool valid = true;
    std::string message;
    // Action names and outcome indices from the root to the offending node.
    std::string path;
};

// Checks the strong or weak plan definition. FAIL leaves are accepted iff the
// certifier accepts them; the default certifier is rpg_certifier.
ValidationReport validate_plan(const PlanningTask &task, const ActionTree &tree, Mode mode,
                               const FailCertifier &certifier = nullptr);
ValidationReport validate_plan_from(const PlanningTask &task, const SearchState &root,
                                    const ActionTree &tree, Mode mode,
                                    const FailCertifier &certifier = nullptr);

// Search states of all FAIL leaves of a plan.
std::vector<SearchState> fail_leaf_states(const PlanningTask &task, const ActionTree &tree);
std::vector<SearchState> fail_leaf_states_from(const PlanningTask &task, const SearchState &root,
                                               const ActionTree &tree);

} // namespace sam

#endif
