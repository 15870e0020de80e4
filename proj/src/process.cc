#include "sam/process.h"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

using namespace std;
using json = nlohmann::json;

namespace sam {

namespace {
StrippedNode *strip(const PlanningTask &task, const ActionTree &tree, StrippedTree &out) {
    out.nodes.push_back(make_unique<StrippedNode>());
    StrippedNode *node = out.nodes.back().get();
    if (!tree.is_action()) {
        ++out.stop_leaves;
        return node;
    }
    const Action &action = task.action(tree.action());
    node->action = tree.action();
    node->name = action.name;
    for (size_t o = 0; o < tree.children().size(); ++o) {
        const ActionTree &child = tree.children()[o];
        if (child.kind() == ActionTree::Kind::fail) {
            node->may_fail = true;
            continue;
        }
        StrippedNode::Branch branch;
        branch.outcome = static_cast<int>(o);
        branch.label = render(task, action.outcomes[o]);
        branch.node = strip(task, child, out);
        node->branches.push_back(branch);
    }
    return node;
}
} // namespace

StrippedTree strip_failed(const PlanningTask &task, const ActionTree &tree) {
    StrippedTree out;
    out.root = strip(task, tree, out);
    return out;
}

string to_string(ProcessNodeKind kind) {
    switch (kind) {
    case ProcessNodeKind::start:
        return "start";
    case ProcessNodeKind::end:
        return "end";
    case ProcessNodeKind::task:
        return "task";
    case ProcessNodeKind::xor_split:
        return "xor_split";
    case ProcessNodeKind::xor_join:
        return "xor_join";
    case ProcessNodeKind::and_split:
        return "and_split";
    case ProcessNodeKind::and_join:
        return "and_join";
    }
    return "";
}

ProcessNodeKind process_kind_from_string(const string &name) {
    for (ProcessNodeKind kind : {ProcessNodeKind::start, ProcessNodeKind::end, ProcessNodeKind::task,
                                 ProcessNodeKind::xor_split, ProcessNodeKind::xor_join,
                                 ProcessNodeKind::and_split, ProcessNodeKind::and_join})
        if (to_string(kind) == name)
            return kind;
    throw invalid_argument("unknown process node kind '" + name + "'");
}

int ProcessGraph::add_node(ProcessNodeKind kind, string name, ActionId action) {
    ProcessNode node;
    node.id = static_cast<int>(nodes.size());
    node.kind = kind;
    node.name = move(name);
    node.action = action;
    nodes.push_back(move(node));
    return nodes.back().id;
}

void ProcessGraph::add_edge(int from, int to, string label, int outcome) {
    edges.push_back(ProcessEdge{from, to, move(label), outcome});
}

const ProcessNode &ProcessGraph::node(int id) const {
    return nodes.at(static_cast<size_t>(id));
}

vector<int> ProcessGraph::out_edges(int id) const {
    vector<int> result;
    for (size_t e = 0; e < edges.size(); ++e)
        if (edges[e].from == id)
            result.push_back(static_cast<int>(e));
    return result;
}

vector<int> ProcessGraph::in_edges(int id) const {
    vector<int> result;
    for (size_t e = 0; e < edges.size(); ++e)
        if (edges[e].to == id)
            result.push_back(static_cast<int>(e));
    return result;
}

map<string, int> ProcessGraph::kind_counts() const {
    map<string, int> counts;
    for (const ProcessNode &node : nodes)
        ++counts[to_string(node.kind)];
    return counts;
}

ProcessFragment split_checks(const StrippedTree &tree) {
    ProcessFragment fragment;
    fragment.stop_leaves = tree.stop_leaves;
    function<int(const StrippedNode *)> convert = [&](const StrippedNode *node) {
        int id = static_cast<int>(fragment.units.size());
        fragment.units.emplace_back();
        fragment.units.back().action = node->action;
        fragment.units.back().name = node->name;
        fragment.units.back().may_fail = node->may_fail;
        fragment.units.back().references = 1;
        for (size_t b = 0; b < node->branches.size(); ++b) {
            int child = convert(node->branches[b].node);
            ProcessFragment::Unit &unit = fragment.units[static_cast<size_t>(id)];
            unit.children.emplace_back(static_cast<int>(b), child);
            unit.labels.push_back(node->branches[b].label);
            unit.outcomes.push_back(node->branches[b].outcome);
        }
        return id;
    };
    fragment.root = convert(tree.root);
    return fragment;
}

ProcessFragment merge_identical_subtrees(const ProcessFragment &fragment) {
    ProcessFragment merged;
    merged.stop_leaves = fragment.stop_leaves;
    map<string, int> canonical;
    function<int(int)> visit = [&](int id) {
        const ProcessFragment::Unit &unit = fragment.units[static_cast<size_t>(id)];
        ProcessFragment::Unit copy = unit;
        copy.references = 0;
        ostringstream key;
        key << unit.action << '\x1f' << unit.may_fail;
        for (size_t b = 0; b < unit.children.size(); ++b) {
            int child = visit(unit.children[b].second);
            copy.children[b].second = child;
            key << '\x1f' << unit.outcomes[b] << '\x1e' << child;
        }
        auto [it, inserted] = canonical.emplace(key.str(), static_cast<int>(merged.units.size()));
        if (inserted)
            merged.units.push_back(move(copy));
        return it->second;
    };
    merged.root = visit(fragment.root);
    for (const ProcessFragment::Unit &unit : merged.units)
        for (const auto &child : unit.children)
            ++merged.units[static_cast<size_t>(child.second)].references;
    ++merged.units[static_cast<size_t>(merged.root)].references;
    return merged;
}

ProcessGraph close_graph(const ProcessFragment &fragment) {
    ProcessGraph graph;
    int start = graph.add_node(ProcessNodeKind::start);
    int final_join = -1;
    vector<int> entry(fragment.units.size(), -1);
    vector<int> pending_stops;

    function<int(int)> enter = [&](int id) -> int {
        const ProcessFragment::Unit &unit = fragment.units[static_cast<size_t>(id)];
        if (unit.action < 0)
            return -1;
        if (entry[static_cast<size_t>(id)] >= 0)
            return entry[static_cast<size_t>(id)];
        int join = -1;
        if (unit.references > 1)
            join = graph.add_node(ProcessNodeKind::xor_join);
        int task = graph.add_node(ProcessNodeKind::task, unit.name, unit.action);
        graph.nodes[static_cast<size_t>(task)].may_fail = unit.may_fail;
        if (join >= 0)
            graph.add_edge(join, task);
        entry[static_cast<size_t>(id)] = join >= 0 ? join : task;

        auto connect = [&](int from, size_t b, string label, int outcome) {
            int target = enter(unit.children[b].second);
            if (target < 0) {
                pending_stops.push_back(static_cast<int>(graph.edges.size()));
                target = -1;
            }
            graph.add_edge(from, target, move(label), outcome);
        };
        if (unit.children.size() > 1) {
            int split = graph.add_node(ProcessNodeKind::xor_split, unit.name, unit.action);
            graph.add_edge(task, split);
            for (size_t b = 0; b < unit.children.size(); ++b)
                connect(split, b, unit.labels[b], unit.outcomes[b]);
        } else if (unit.children.size() == 1) {
            graph.nodes[static_cast<size_t>(task)].outcome = unit.outcomes.front();
            connect(task, 0, "", -1);
        }
        return entry[static_cast<size_t>(id)];
    };

    int root_entry = enter(fragment.root);
    if (root_entry < 0) {
        pending_stops.push_back(static_cast<int>(graph.edges.size()));
        graph.add_edge(start, -1);
    } else {
        graph.add_edge(start, root_entry);
    }
    if (fragment.stop_leaves > 1)
        final_join = graph.add_node(ProcessNodeKind::xor_join);
    int end = graph.add_node(ProcessNodeKind::end);
    for (int e : pending_stops)
        graph.edges[static_cast<size_t>(e)].to = final_join >= 0 ? final_join : end;
    if (final_join >= 0)
        graph.add_edge(final_join, end);
    return graph;
}

namespace {
struct Footprint {
    set<VarId> reads;
    set<VarId> writes;
};

Footprint footprint(const PlanningTask &task, ActionId id) {
    Footprint fp;
    const Action &action = task.action(id);
    for (VarId v : formula_variables(action.precondition))
        fp.reads.insert(v);
    for (const PartialAssignment &outcome : action.outcomes)
        for (const Fact &f : outcome)
            fp.writes.insert(f.var);
    return fp;
}

bool intersects(const set<VarId> &a, const set<VarId> &b) {
    return any_of(a.begin(), a.end(), [&](VarId v) { return b.count(v) > 0; });
}

vector<vector<int>> components(const PlanningTask &task, const vector<int> &window,
                               const vector<ActionId> &actions) {
    vector<int> parent(window.size());
    iota(parent.begin(), parent.end(), 0);
    function<int(int)> find = [&](int x) { return parent[static_cast<size_t>(x)] == x ? x : parent[static_cast<size_t>(x)] = find(parent[static_cast<size_t>(x)]); };
    for (size_t i = 0; i < window.size(); ++i)
        for (size_t j = i + 1; j < window.size(); ++j)
            if (tasks_interact(task, actions[i], actions[j]))
                parent[static_cast<size_t>(find(static_cast<int>(i)))] = find(static_cast<int>(j));
    map<int, vector<int>> groups;
    vector<int> order;
    for (size_t i = 0; i < window.size(); ++i) {
        int root = find(static_cast<int>(i));
        if (!groups.count(root))
            order.push_back(root);
        groups[root].push_back(window[i]);
    }
    vector<vector<int>> result;
    for (int root : order)
        result.push_back(groups[root]);
    return result;
}
} // namespace

bool tasks_interact(const PlanningTask &task, ActionId a, ActionId b) {
    Footprint fa = footprint(task, a);
    Footprint fb = footprint(task, b);
    return intersects(fa.writes, fb.reads) || intersects(fa.writes, fb.writes) ||
           intersects(fb.writes, fa.reads);
}

ProcessGraph parallelize(const ProcessGraph &graph, const PlanningTask &task) {
    auto is_task = [&](int id) { return graph.node(id).kind == ProcessNodeKind::task; };
    auto link = [&](int id) -> int {
        vector<int> out = graph.out_edges(id);
        if (!is_task(id) || out.size() != 1)
            return -1;
        int next = graph.edges[static_cast<size_t>(out.front())].to;
        if (!is_task(next) || graph.in_edges(next).size() != 1)
            return -1;
        return next;
    };
    vector<int> predecessor(graph.nodes.size(), -1);
    for (const ProcessNode &node : graph.nodes) {
        int next = link(node.id);
        if (next >= 0)
            predecessor[static_cast<size_t>(next)] = node.id;
    }

    struct Block {
        vector<int> window;
        vector<vector<int>> components;
    };
    vector<Block> blocks;
    for (const ProcessNode &node : graph.nodes) {
        if (!is_task(node.id) || predecessor[static_cast<size_t>(node.id)] >= 0)
            continue;
        vector<int> chain{node.id};
        for (int next = link(node.id); next >= 0; next = link(next))
            chain.push_back(next);
        size_t i = 0;
        while (i < chain.size()) {
            size_t best = i;
            Block block;
            for (size_t j = i + 1; j < chain.size(); ++j) {
                vector<int> window(chain.begin() + static_cast<long>(i), chain.begin() + static_cast<long>(j) + 1);
                vector<ActionId> actions;
                for (int id : window)
                    actions.push_back(graph.node(id).action);
                vector<vector<int>> comps = components(task, window, actions);
                if (comps.size() >= 2) {
                    best = j;
                    block = Block{window, move(comps)};
                }
            }
            if (best == i) {
                ++i;
                continue;
            }
            blocks.push_back(move(block));
            i = best + 1;
        }
    }
    if (blocks.empty())
        return graph;

    ProcessGraph result = graph;
    set<int> removed;
    vector<ProcessEdge> added;
    for (const Block &block : blocks) {
        int in = graph.in_edges(block.window.front()).front();
        int out = graph.out_edges(block.window.back()).front();
        for (int id : block.window)
            for (int e : graph.out_edges(id))
                removed.insert(e);
        removed.insert(in);
        int split = result.add_node(ProcessNodeKind::and_split);
        int join = result.add_node(ProcessNodeKind::and_join);
        const ProcessEdge &in_edge = graph.edges[static_cast<size_t>(in)];
        const ProcessEdge &out_edge = graph.edges[static_cast<size_t>(out)];
        added.push_back(ProcessEdge{in_edge.from, split, in_edge.label, in_edge.outcome});
        for (const auto &comp : block.components) {
            added.push_back(ProcessEdge{split, comp.front(), "", -1});
            for (size_t k = 0; k + 1 < comp.size(); ++k)
                added.push_back(ProcessEdge{comp[k], comp[k + 1], "", -1});
            added.push_back(ProcessEdge{comp.back(), join, "", -1});
        }
        added.push_back(ProcessEdge{join, out_edge.to, out_edge.label, out_edge.outcome});
    }
    result.edges.clear();
    for (size_t e = 0; e < graph.edges.size(); ++e)
        if (!removed.count(static_cast<int>(e)))
            result.edges.push_back(graph.edges[e]);
    result.edges.insert(result.edges.end(), added.begin(), added.end());
    return result;
}

ProcessGraph plan_to_process(const PlanningTask &task, const ActionTree &tree) {
    StrippedTree stripped = strip_failed(task, tree);
    ProcessFragment fragment = merge_identical_subtrees(split_checks(stripped));
    return parallelize(close_graph(fragment), task);
}

ProcessFormat process_format_from_string(const string &name) {
    if (name == "json")
        return ProcessFormat::json;
    if (name == "dot")
        return ProcessFormat::dot;
    if (name == "bpmn" || name == "bpmn_xml")
        return ProcessFormat::bpmn_xml;
    throw invalid_argument("unknown output format '" + name + "'");
}

json process_to_json(const ProcessGraph &graph) {
    json nodes = json::array();
    for (const ProcessNode &node : graph.nodes) {
        json n{{"id", node.id}, {"kind", to_string(node.kind)}};
        if (!node.name.empty())
            n["name"] = node.name;
        if (node.kind == ProcessNodeKind::task)
            n["may_fail"] = node.may_fail;
        if (node.action >= 0)
            n["action"] = node.action;
        if (node.outcome >= 0)
            n["outcome"] = node.outcome;
        nodes.push_back(move(n));
    }
    json edges = json::array();
    for (const ProcessEdge &edge : graph.edges) {
        json e{{"from", edge.from}, {"to", edge.to}};
        if (!edge.label.empty())
            e["label"] = edge.label;
        if (edge.outcome >= 0)
            e["outcome"] = edge.outcome;
        edges.push_back(move(e));
    }
    return json{{"nodes", nodes}, {"edges", edges}};
}

ProcessGraph process_from_json(const json &doc) {
    ProcessGraph graph;
    for (const json &n : doc.at("nodes")) {
        ProcessNode node;
        node.id = n.at("id").get<int>();
        node.kind = process_kind_from_string(n.at("kind").get<string>());
        node.name = n.value("name", "");
        node.may_fail = n.value("may_fail", false);
        node.action = n.value("action", -1);
        node.outcome = n.value("outcome", -1);
        if (node.id != static_cast<int>(graph.nodes.size()))
            throw invalid_argument("process node ids must be consecutive");
        graph.nodes.push_back(move(node));
    }
    for (const json &e : doc.at("edges")) {
        ProcessEdge edge{e.at("from").get<int>(), e.at("to").get<int>(), e.value("label", ""),
                         e.value("outcome", -1)};
        if (edge.from < 0 || edge.to < 0 || edge.from >= static_cast<int>(graph.nodes.size()) ||
            edge.to >= static_cast<int>(graph.nodes.size()))
            throw invalid_argument("process edge refers to an unknown node");
        graph.edges.push_back(move(edge));
    }
    return graph;
}

namespace {
string dot_escape(const string &text) {
    string out;
    for (char c : text) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out;
}

string xml_escape(const string &text) {
    string out;
    for (char c : text) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

string emit_dot(const ProcessGraph &graph) {
    ostringstream out;
    out << "digraph process {\n  rankdir=LR;\n";
    for (const ProcessNode &node : graph.nodes) {
        out << "  n" << node.id << " [";
        switch (node.kind) {
        case ProcessNodeKind::start:
            out << "shape=circle, label=\"\"";
            break;
        case ProcessNodeKind::end:
            out << "shape=doublecircle, label=\"\"";
            break;
        case ProcessNodeKind::task:
            out << "shape=box, style=\"rounded" << (node.may_fail ? ",filled\", color=red, fillcolor=\"#ffe0e0\"" : "\"")
                << ", label=\"" << dot_escape(node.name) << "\"";
            break;
        case ProcessNodeKind::xor_split:
        case ProcessNodeKind::xor_join:
            out << "shape=diamond, label=\"×\"";
            break;
        case ProcessNodeKind::and_split:
        case ProcessNodeKind::and_join:
            out << "shape=diamond, label=\"+\"";
            break;
        }
        out << "];\n";
    }
    for (const ProcessEdge &edge : graph.edges) {
        out << "  n" << edge.from << " -> n" << edge.to;
        if (!edge.label.empty())
            out << " [label=\"" << dot_escape(edge.label) << "\"]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

string emit_bpmn(const ProcessGraph &graph) {
    ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<definitions xmlns=\"http://www.omg.org/spec/BPMN/20100524/MODEL\" id=\"definitions\" "
           "targetNamespace=\"http://example.org/samplan\">\n"
        << "  <process id=\"process\" isExecutable=\"false\">\n";
    for (const ProcessNode &node : graph.nodes) {
        string id = "n" + std::to_string(node.id);
        switch (node.kind) {
        case ProcessNodeKind::start:
            out << "    <startEvent id=\"" << id << "\"/>\n";
            break;
        case ProcessNodeKind::end:
            out << "    <endEvent id=\"" << id << "\"/>\n";
            break;
        case ProcessNodeKind::task:
            out << "    <task id=\"" << id << "\" name=\"" << xml_escape(node.name) << "\"";
            if (node.may_fail)
                out << " mayFail=\"true\"";
            out << "/>\n";
            break;
        case ProcessNodeKind::xor_split:
            out << "    <exclusiveGateway id=\"" << id << "\" name=\"" << xml_escape(node.name)
                << "\" gatewayDirection=\"Diverging\"/>\n";
            break;
        case ProcessNodeKind::xor_join:
            out << "    <exclusiveGateway id=\"" << id << "\" gatewayDirection=\"Converging\"/>\n";
            break;
        case ProcessNodeKind::and_split:
            out << "    <parallelGateway id=\"" << id << "\" gatewayDirection=\"Diverging\"/>\n";
            break;
        case ProcessNodeKind::and_join:
            out << "    <parallelGateway id=\"" << id << "\" gatewayDirection=\"Converging\"/>\n";
            break;
        }
    }
    for (size_t e = 0; e < graph.edges.size(); ++e) {
        const ProcessEdge &edge = graph.edges[e];
        out << "    <sequenceFlow id=\"e" << e << "\" sourceRef=\"n" << edge.from << "\" targetRef=\"n"
            << edge.to << "\"";
        if (!edge.label.empty())
            out << " name=\"" << xml_escape(edge.label) << "\"";
        out << "/>\n";
    }
    out << "  </process>\n</definitions>\n";
    return out.str();
}
} // namespace

string emit(const ProcessGraph &graph, ProcessFormat format) {
    switch (format) {
    case ProcessFormat::json:
        return process_to_json(graph).dump(2);
    case ProcessFormat::dot:
        return emit_dot(graph);
    case ProcessFormat::bpmn_xml:
        return emit_bpmn(graph);
    }
    return "";
}

string check_process_graph(const ProcessGraph &graph) {
    int start = -1, end = -1;
    for (const ProcessNode &node : graph.nodes) {
        if (node.kind == ProcessNodeKind::start) {
            if (start >= 0)
                return "more than one start node";
            start = node.id;
        } else if (node.kind == ProcessNodeKind::end) {
            if (end >= 0)
                return "more than one end node";
            end = node.id;
        }
    }
    if (start < 0 || end < 0)
        return "missing start or end node";
    auto reach = [&](int from, bool forward) {
        vector<char> seen(graph.nodes.size(), 0);
        vector<int> stack{from};
        seen[static_cast<size_t>(from)] = 1;
        while (!stack.empty()) {
            int n = stack.back();
            stack.pop_back();
            for (const ProcessEdge &e : graph.edges) {
                int a = forward ? e.from : e.to;
                int b = forward ? e.to : e.from;
                if (a == n && !seen[static_cast<size_t>(b)]) {
                    seen[static_cast<size_t>(b)] = 1;
                    stack.push_back(b);
                }
            }
        }
        return seen;
    };
    vector<char> from_start = reach(start, true);
    vector<char> to_end = reach(end, false);
    for (const ProcessNode &node : graph.nodes) {
        if (!from_start[static_cast<size_t>(node.id)])
            return "node " + std::to_string(node.id) + " not reachable from start";
        if (!to_end[static_cast<size_t>(node.id)])
            return "end not reachable from node " + std::to_string(node.id);
    }
    return "";
}

namespace {
using Execution = vector<pair<ActionId, int>>;

class TokenGame {
    const ProcessGraph &graph_;
    vector<vector<int>> in_, out_;
    size_t limit_;
    set<Execution> results_;

public:
    TokenGame(const ProcessGraph &graph, size_t limit) : graph_(graph), limit_(limit) {
        in_.resize(graph.nodes.size());
        out_.resize(graph.nodes.size());
        for (size_t e = 0; e < graph.edges.size(); ++e) {
            out_[static_cast<size_t>(graph.edges[e].from)].push_back(static_cast<int>(e));
            in_[static_cast<size_t>(graph.edges[e].to)].push_back(static_cast<int>(e));
        }
    }

    set<Execution> run() {
        vector<int> tokens(graph_.edges.size(), 0);
        for (const ProcessNode &node : graph_.nodes)
            if (node.kind == ProcessNodeKind::start)
                for (int e : out_[static_cast<size_t>(node.id)])
                    ++tokens[static_cast<size_t>(e)];
        Execution trace;
        explore(tokens, trace);
        return results_;
    }

private:
    int marked_input(int node, const vector<int> &tokens) const {
        for (int e : in_[static_cast<size_t>(node)])
            if (tokens[static_cast<size_t>(e)] > 0)
                return e;
        return -1;
    }

    void fire_all(int node, vector<int> &tokens) const {
        for (int e : out_[static_cast<size_t>(node)])
            ++tokens[static_cast<size_t>(e)];
    }

    void explore(vector<int> tokens, Execution trace) {
        if (results_.size() >= limit_)
            return;
        // Gateways other than XOR splits fire eagerly; they commute with everything.
        bool progress = true;
        bool finished = false;
        while (progress) {
            progress = false;
            for (const ProcessNode &node : graph_.nodes) {
                ProcessNodeKind kind = node.kind;
                if (kind == ProcessNodeKind::xor_join || kind == ProcessNodeKind::and_split ||
                    kind == ProcessNodeKind::end) {
                    int e = marked_input(node.id, tokens);
                    if (e < 0)
                        continue;
                    --tokens[static_cast<size_t>(e)];
                    if (kind == ProcessNodeKind::end)
                        finished = true;
                    else
                        fire_all(node.id, tokens);
                    progress = true;
                } else if (kind == ProcessNodeKind::and_join) {
                    const vector<int> &inputs = in_[static_cast<size_t>(node.id)];
                    if (inputs.empty() || !all_of(inputs.begin(), inputs.end(), [&](int e) {
                            return tokens[static_cast<size_t>(e)] > 0;
                        }))
                        continue;
                    for (int e : inputs)
                        --tokens[static_cast<size_t>(e)];
                    fire_all(node.id, tokens);
                    progress = true;
                }
            }
        }
        if (finished) {
            if (all_of(tokens.begin(), tokens.end(), [](int t) { return t == 0; }))
                results_.insert(trace);
            return;
        }
        for (const ProcessNode &node : graph_.nodes) {
            if (node.kind == ProcessNodeKind::xor_split) {
                int e = marked_input(node.id, tokens);
                if (e < 0)
                    continue;
                for (int o : out_[static_cast<size_t>(node.id)]) {
                    vector<int> next = tokens;
                    --next[static_cast<size_t>(e)];
                    ++next[static_cast<size_t>(o)];
                    Execution t = trace;
                    for (auto it = t.rbegin(); it != t.rend(); ++it)
                        if (it->first == node.action && it->second < 0) {
                            it->second = graph_.edges[static_cast<size_t>(o)].outcome;
                            break;
                        }
                    explore(move(next), move(t));
                }
                return;
            }
        }
        for (const ProcessNode &node : graph_.nodes) {
            if (node.kind != ProcessNodeKind::task)
                continue;
            int e = marked_input(node.id, tokens);
            if (e < 0)
                continue;
            vector<int> next = tokens;
            --next[static_cast<size_t>(e)];
            fire_all(node.id, next);
            Execution t = trace;
            t.emplace_back(node.action, node.outcome);
            explore(move(next), move(t));
        }
    }
};

void collect_paths(const ActionTree &tree, Execution &prefix, vector<Execution> &out) {
    if (tree.kind() == ActionTree::Kind::stop) {
        out.push_back(prefix);
        return;
    }
    if (tree.kind() == ActionTree::Kind::fail)
        return;
    for (size_t o = 0; o < tree.children().size(); ++o) {
        prefix.emplace_back(tree.action(), static_cast<int>(o));
        collect_paths(tree.children()[o], prefix, out);
        prefix.pop_back();
    }
}
} // namespace

vector<Execution> process_executions(const ProcessGraph &graph, size_t limit) {
    set<Execution> result = TokenGame(graph, limit).run();
    return vector<Execution>(result.begin(), result.end());
}

vector<Execution> plan_paths(const ActionTree &tree) {
    vector<Execution> out;
    Execution prefix;
    collect_paths(tree, prefix, out);
    return out;
}

string check_language_preservation(const PlanningTask &task, const ActionTree &tree, const ProcessGraph &graph) {
    vector<Execution> paths = plan_paths(tree);
    vector<Execution> executions = process_executions(graph);
    set<Execution> execution_set(executions.begin(), executions.end());
    multiset<multiset<pair<ActionId, int>>> path_bags;
    for (const Execution &path : paths) {
        if (!execution_set.count(path))
            return "a successful plan path is not an execution of the process";
        path_bags.insert(multiset<pair<ActionId, int>>(path.begin(), path.end()));
    }
    for (const Execution &execution : executions) {
        if (!path_bags.count(multiset<pair<ActionId, int>>(execution.begin(), execution.end())))
            return "a process execution uses steps of no plan path";
        SearchState ss = initial_search_state(task);
        for (const auto &[action, outcome] : execution) {
            if (action < 0 || outcome < 0 || !applicable(task, ss, action))
                return "a process execution applies '" +
                       (action >= 0 ? task.action(action).name : string("?")) + "' where it is not applicable";
            ss.state = apply_outcome(ss.state, task.action(action).outcomes[static_cast<size_t>(outcome)]);
            int nd = task.nondet_index(action);
            if (nd >= 0)
                ss.available[static_cast<size_t>(nd)] = false;
        }
        if (!goal_satisfied(ss.state, task.goal()))
            return "a process execution ends outside the goal";
    }
    return "";
}

} // namespace sam
