#ifndef SAM_PROCESS_H
#define SAM_PROCESS_H

#include "sam/model.h"

#include <json.hpp>

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace sam {

// A plan tree with FAIL branches removed.
struct StrippedNode {
    // -1 for STOP.
    ActionId action = -1;
    std::string name;
    bool may_fail = false;
    struct Branch {
        int outcome = 0;
        std::string label;
        StrippedNode *node = nullptr;
    };
    std::vector<Branch> branches;

    bool is_stop() const { return action < 0; }
};

struct StrippedTree {
    std::vector<std::unique_ptr<StrippedNode>> nodes;
    StrippedNode *root = nullptr;
    int stop_leaves = 0;
};

StrippedTree strip_failed(const PlanningTask &task, const ActionTree &tree);

enum class ProcessNodeKind { start, end, task, xor_split, xor_join, and_split, and_join };

std::string to_string(ProcessNodeKind kind);
ProcessNodeKind process_kind_from_string(const std::string &name);

struct ProcessNode {
    int id = 0;
    ProcessNodeKind kind = ProcessNodeKind::task;
    std::string name;
    bool may_fail = false;
    ActionId action = -1;
    // Tasks without a following XOR split: index of the one outcome kept.
    int outcome = -1;

    friend bool operator==(const ProcessNode &, const ProcessNode &) = default;
};

struct ProcessEdge {
    int from = 0;
    int to = 0;
    std::string label;
    // Set on edges leaving an XOR split.
    int outcome = -1;

    friend bool operator==(const ProcessEdge &, const ProcessEdge &) = default;
};

struct ProcessGraph {
    std::vector<ProcessNode> nodes;
    std::vector<ProcessEdge> edges;

    int add_node(ProcessNodeKind kind, std::string name = {}, ActionId action = -1);
    void add_edge(int from, int to, std::string label = {}, int outcome = -1);
    const ProcessNode &node(int id) const;
    std::vector<int> out_edges(int id) const;
    std::vector<int> in_edges(int id) const;
    std::map<std::string, int> kind_counts() const;

    friend bool operator==(const ProcessGraph &, const ProcessGraph &) = default;
};

// Tasks plus XOR splits, with identical subtrees shared (in-degree > 1).
// Start, end and joins are added by close_graph.
struct ProcessFragment {
    struct Unit {
        ActionId action = -1;
        std::string name;
        bool may_fail = false;
        std::vector<std::pair<int, int>> children; // (branch index, unit)
        std::vector<std::string> labels;
        std::vector<int> outcomes;
        int references = 0;
    };
    // STOP units have action -1.
    std::vector<Unit> units;
    int root = 0;
    int stop_leaves = 0;
};

ProcessFragment split_checks(const StrippedTree &tree);
ProcessFragment merge_identical_subtrees(const ProcessFragment &fragment);
ProcessGraph close_graph(const ProcessFragment &fragment);

/*
  Groups runs of consecutive tasks inside split/join-free chains into parallel
  blocks. Two tasks interact if one writes a variable the other reads or
  writes; each connected component of a run becomes one branch, keeping the
  original order.
*/
ProcessGraph parallelize(const ProcessGraph &graph, const PlanningTask &task);

bool tasks_interact(const PlanningTask &task, ActionId a, ActionId b);

// The whole pipeline.
ProcessGraph plan_to_process(const PlanningTask &task, const ActionTree &tree);

enum class ProcessFormat { json, dot, bpmn_xml };
ProcessFormat process_format_from_string(const std::string &name);

std::string emit(const ProcessGraph &graph, ProcessFormat format);
nlohmann::json process_to_json(const ProcessGraph &graph);
ProcessGraph process_from_json(const nlohmann::json &doc);

// Empty string if the graph has one start, one end, everything reachable from
// start and end reachable from everything.
std::string check_process_graph(const ProcessGraph &graph);

// Token-game executions of the graph as (action, outcome) sequences; every
// interleaving of parallel branches is listed.
std::vector<std::vector<std::pair<ActionId, int>>> process_executions(const ProcessGraph &graph,
                                                                      std::size_t limit = 100000);

// Root-to-STOP paths of a plan tree as (action, outcome) sequences.
std::vector<std::vector<std::pair<ActionId, int>>> plan_paths(const ActionTree &tree);

// Empty string if the process executions and the plan's successful paths
// correspond (see process_executions / plan_paths).
std::string check_language_preservation(const PlanningTask &task, const ActionTree &tree,
                                        const ProcessGraph &graph);

} // namespace sam

#endif
