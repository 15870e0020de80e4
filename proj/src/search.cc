#include "sam/search.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

using namespace std;

namespace sam {

namespace {
constexpr double inf = numeric_limits<double>::infinity();

class Timer {
    chrono::steady_clock::time_point start_ = chrono::steady_clock::now();

public:
    double elapsed() const {
        return chrono::duration<double>(chrono::steady_clock::now() - start_).count();
    }
};
} // namespace

string to_string(Mode mode) {
    switch (mode) {
    case Mode::strong:
        return "strong";
    case Mode::weak:
        return "weak";
    default:
        return "auto";
    }
}

Mode mode_from_string(const string &name) {
    if (name == "strong")
        return Mode::strong;
    if (name == "weak")
        return Mode::weak;
    if (name == "auto")
        return Mode::auto_;
    throw invalid_argument("unknown mode '" + name + "'");
}

string to_string(Status status) {
    switch (status) {
    case Status::solved:
        return "solved";
    case Status::failed:
        return "failed";
    default:
        return "unknown";
    }
}

string to_string(Verdict verdict) {
    switch (verdict) {
    case Verdict::plan:
        return "plan";
    case Verdict::unsolvable:
        return "unsolvable";
    case Verdict::exhausted_unknown:
        return "exhausted_unknown";
    default:
        return "resource_limit";
    }
}

Status sam_aggregate(const vector<Status> &children) {
    bool any_solved = false;
    bool all_failed = true;
    bool all_decided = true;
    for (Status s : children) {
        any_solved |= s == Status::solved;
        all_failed &= s == Status::failed;
        all_decided &= s != Status::unknown;
    }
    if (any_solved && all_decided)
        return Status::solved;
    if (all_failed)
        return Status::failed;
    return Status::unknown;
}

Status and_aggregate(const vector<Status> &children) {
    if (any_of(children.begin(), children.end(), [](Status s) { return s == Status::failed; }))
        return Status::failed;
    if (all_of(children.begin(), children.end(), [](Status s) { return s == Status::solved; }))
        return Status::solved;
    return Status::unknown;
}

Status or_aggregate(const vector<Status> &children) {
    if (any_of(children.begin(), children.end(), [](Status s) { return s == Status::solved; }))
        return Status::solved;
    if (all_of(children.begin(), children.end(), [](Status s) { return s == Status::failed; }))
        return Status::failed;
    return Status::unknown;
}

double and_node_f(const vector<Status> &statuses, const vector<double> &f) {
    double result = -inf;
    for (size_t i = 0; i < statuses.size(); ++i)
        if (statuses[i] != Status::failed)
            result = max(result, f[i]);
    return result == -inf ? inf : result;
}

AndOrSearch::AndOrSearch(const PlanningTask &task, Mode mode, const SearchConfig &config)
    : task_(task), mode_(mode), config_(config), heuristic_(make_heuristic(config.heuristic, task)) {
    if (mode == Mode::auto_)
        throw invalid_argument("AndOrSearch needs a concrete mode");
    if (!(config.weight >= 1.0))
        throw invalid_argument("weight must be at least 1");
}

bool AndOrSearch::is_direct_duplicate(int or_node, const SearchState &candidate) const {
    for (int n = or_node; n >= 0;) {
        const Node &node = nodes_[static_cast<size_t>(n)];
        if (node.content == candidate)
            return true;
        n = node.parent < 0 ? -1 : nodes_[static_cast<size_t>(node.parent)].parent;
    }
    return false;
}

void AndOrSearch::evaluate(int or_node) {
    Node &node = nodes_[static_cast<size_t>(or_node)];
    HeuristicOutcome h = heuristic_->evaluate(node.content);
    ++stats_.evaluations;
    node.h = h.value;
    node.helpful = move(h.helpful);
    if (h.value == 0) {
        node.status = Status::solved;
        node.f = 0.0;
    } else if (h.dead_end()) {
        node.status = Status::failed;
        node.f = inf;
    } else {
        node.status = Status::unknown;
        node.f = config_.weight * h.value;
    }
}

int AndOrSearch::add_or_node(int parent, SearchState content) {
    Node node;
    node.is_or = true;
    node.parent = parent;
    if (parent >= 0)
        node.depth = nodes_[static_cast<size_t>(nodes_[static_cast<size_t>(parent)].parent)].depth + 1;
    if (node.depth > config_.depth_ceiling)
        throw SearchInvariantError("search depth ceiling " + std::to_string(config_.depth_ceiling) +
                                   " exceeded");
    node.content = move(content);
    stats_.max_depth = max(stats_.max_depth, node.depth);
    ++stats_.generated;
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back(move(node));
    if (parent >= 0)
        nodes_[static_cast<size_t>(parent)].children.push_back(id);
    evaluate(id);
    return id;
}

void AndOrSearch::expand(int or_node) {
    ++stats_.expansions;
    const SearchState ss = nodes_[static_cast<size_t>(or_node)].content;
    const vector<ActionId> helpful = nodes_[static_cast<size_t>(or_node)].helpful;
    for (ActionId id = 0; id < task_.num_actions(); ++id) {
        if (!applicable(task_, ss, id))
            continue;
        if (config_.helpful_pruning && !binary_search(helpful.begin(), helpful.end(), id)) {
            stats_.pruned = true;
            continue;
        }
        const Action &action = task_.action(id);
        SearchState next_base = ss;
        int nd = task_.nondet_index(id);
        if (nd >= 0)
            next_base.available[static_cast<size_t>(nd)] = false;
        if (action.deterministic()) {
            SearchState successor{apply_outcome(ss.state, action.outcomes.front()), next_base.available};
            if (is_direct_duplicate(or_node, successor))
                continue;
        }
        Node and_node;
        and_node.is_or = false;
        and_node.parent = or_node;
        and_node.depth = nodes_[static_cast<size_t>(or_node)].depth;
        and_node.action = id;
        int and_id = static_cast<int>(nodes_.size());
        nodes_.push_back(move(and_node));
        nodes_[static_cast<size_t>(or_node)].children.push_back(and_id);
        for (const PartialAssignment &outcome : action.outcomes)
            add_or_node(and_id, SearchState{apply_outcome(ss.state, outcome), next_base.available});
        update(and_id);
    }
    nodes_[static_cast<size_t>(or_node)].expanded = true;
}

void AndOrSearch::update(int id) {
    Node &node = nodes_[static_cast<size_t>(id)];
    vector<Status> statuses;
    vector<double> f;
    for (int c : node.children) {
        statuses.push_back(nodes_[static_cast<size_t>(c)].status);
        f.push_back(nodes_[static_cast<size_t>(c)].f);
    }
    if (!node.is_or) {
        node.status = mode_ == Mode::weak ? sam_aggregate(statuses) : and_aggregate(statuses);
        if (mode_ == Mode::weak)
            node.f = and_node_f(statuses, f);
        else
            node.f = node.status == Status::failed ? inf : *max_element(f.begin(), f.end());
        return;
    }
    if (!node.expanded)
        return;
    node.status = node.children.empty() ? Status::failed : or_aggregate(statuses);
    Status wanted = node.status == Status::solved ? Status::solved : Status::unknown;
    node.best = -1;
    double best_f = inf;
    for (size_t i = 0; i < statuses.size(); ++i)
        if (statuses[i] == wanted && (node.best < 0 || f[i] < best_f)) {
            node.best = node.children[i];
            best_f = f[i];
        }
    double min_f = f.empty() ? inf : *min_element(f.begin(), f.end());
    node.f = node.status == Status::failed ? inf : (node.status == Status::solved ? 0.0 : min_f + 1.0);
}

void AndOrSearch::propagate(int id) {
    while (id >= 0) {
        update(id);
        id = nodes_[static_cast<size_t>(id)].parent;
    }
}

int AndOrSearch::select_open_node() const {
    int n = 0;
    while (nodes_[static_cast<size_t>(n)].expanded) {
        int a = nodes_[static_cast<size_t>(n)].best;
        if (a < 0)
            throw SearchInvariantError("unknown or-node without an unknown child");
        int next = -1;
        for (int c : nodes_[static_cast<size_t>(a)].children)
            if (nodes_[static_cast<size_t>(c)].status == Status::unknown) {
                next = c;
                break;
            }
        if (next < 0)
            throw SearchInvariantError("unknown and-node without an unknown child");
        n = next;
    }
    return n;
}

ActionTree AndOrSearch::extract_plan(int or_node) const {
    const Node &node = nodes_[static_cast<size_t>(or_node)];
    if (!node.expanded)
        return ActionTree::stop();
    int chosen = node.best;
    if (chosen < 0 || nodes_[static_cast<size_t>(chosen)].status != Status::solved) {
        chosen = -1;
        for (int c : node.children)
            if (nodes_[static_cast<size_t>(c)].status == Status::solved) {
                chosen = c;
                break;
            }
    }
    const Node &and_node = nodes_[static_cast<size_t>(chosen)];
    vector<ActionTree> children;
    for (int c : and_node.children)
        children.push_back(nodes_[static_cast<size_t>(c)].status == Status::solved ? extract_plan(c)
                                                                                  : ActionTree::fail());
    return ActionTree::make_action(and_node.action, move(children));
}

SearchResult AndOrSearch::run(const SearchState &root) {
    Timer timer;
    nodes_.clear();
    stats_ = SearchStatistics{};
    SearchResult result;
    result.plan_mode = mode_;
    add_or_node(-1, root);
    bool out_of_budget = false;
    while (nodes_.front().status == Status::unknown) {
        if ((config_.max_evaluations > 0 && stats_.evaluations >= config_.max_evaluations) ||
            timer.elapsed() > config_.time_budget) {
            out_of_budget = true;
            break;
        }
        int n = select_open_node();
        expand(n);
        propagate(n);
    }
    if (out_of_budget) {
        result.verdict = Verdict::resource_limit;
    } else if (nodes_.front().status == Status::solved) {
        result.verdict = Verdict::plan;
        result.tree = extract_plan(0);
        stats_.failed_leaves = result.tree->count_fail_leaves();
    } else {
        result.verdict = stats_.pruned ? Verdict::exhausted_unknown : Verdict::unsolvable;
    }
    stats_.wall_time = timer.elapsed();
    result.stats = stats_;
    return result;
}

namespace {
SearchResult solve_single(const PlanningTask &task, const SearchState &root, Mode mode,
                          const SearchConfig &config) {
    Timer timer;
    AndOrSearch search(task, mode, config);
    SearchResult result = search.run(root);
    if (result.verdict != Verdict::plan || mode != Mode::weak || !result.stats.pruned ||
        result.stats.failed_leaves == 0)
        return result;

    FFHeuristic rpg(task);
    bool certified = true;
    for (const SearchState &leaf : fail_leaf_states_from(task, root, *result.tree)) {
        if (rpg.rpg(leaf).dead_end())
            continue;
        SearchConfig check = config;
        check.helpful_pruning = false;
        check.time_budget = max(0.0, config.time_budget - timer.elapsed());
        check.max_evaluations = 0;
        SearchResult proof = AndOrSearch(task, Mode::weak, check).run(leaf);
        result.stats.evaluations += proof.stats.evaluations;
        if (proof.verdict != Verdict::unsolvable) {
            certified = false;
            break;
        }
    }
    if (certified)
        return result;

    SearchConfig plain = config;
    plain.helpful_pruning = false;
    plain.time_budget = max(0.0, config.time_budget - timer.elapsed());
    if (config.max_evaluations > 0)
        plain.max_evaluations = max(1L, config.max_evaluations - result.stats.evaluations);
    SearchResult rerun = AndOrSearch(task, Mode::weak, plain).run(root);
    rerun.stats.evaluations += result.stats.evaluations;
    rerun.stats.expansions += result.stats.expansions;
    rerun.stats.generated += result.stats.generated;
    rerun.stats.reran_without_pruning = true;
    rerun.stats.wall_time = timer.elapsed();
    return rerun;
}
} // namespace

SearchResult solve_from(const PlanningTask &task, const SearchState &root, const SearchConfig &config) {
    if (config.mode != Mode::auto_)
        return solve_single(task, root, config.mode, config);
    Timer timer;
    SearchConfig strong = config;
    strong.time_budget = min(config.strong_phase_budget, config.time_budget);
    SearchResult first = solve_single(task, root, Mode::strong, strong);
    if (first.verdict == Verdict::plan) {
        first.strong_phase = Verdict::plan;
        first.strong_stats = first.stats;
        return first;
    }
    SearchConfig weak = config;
    weak.time_budget = max(0.0, config.time_budget - timer.elapsed());
    if (config.max_evaluations > 0)
        weak.max_evaluations = max(1L, config.max_evaluations - first.stats.evaluations);
    SearchResult second = solve_single(task, root, Mode::weak, weak);
    second.strong_phase = first.verdict;
    second.strong_stats = first.stats;
    return second;
}

SearchResult solve(const PlanningTask &task, const SearchConfig &config) {
    return solve_from(task, initial_search_state(task), config);
}

FailCertifier rpg_certifier(const PlanningTask &task) {
    return [&task](const SearchState &ss) { return FFHeuristic(task).rpg(ss).dead_end(); };
}

FailCertifier search_certifier(const PlanningTask &task, double time_budget) {
    return [&task, time_budget](const SearchState &ss) {
        if (FFHeuristic(task).rpg(ss).dead_end())
            return true;
        SearchConfig config;
        config.mode = Mode::weak;
        config.helpful_pruning = false;
        config.time_budget = time_budget;
        return solve_from(task, ss, config).verdict == Verdict::unsolvable;
    };
}

namespace {
class Validator {
    const PlanningTask &task_;
    Mode mode_;
    const FailCertifier &certifier_;

    ValidationReport invalid(const string &path, const string &message) const {
        return ValidationReport{false, message, path.empty() ? "/" : path};
    }

public:
    Validator(const PlanningTask &task, Mode mode, const FailCertifier &certifier)
        : task_(task), mode_(mode), certifier_(certifier) {}

    ValidationReport check(const SearchState &ss, const ActionTree &tree, const string &path) const {
        switch (tree.kind()) {
        case ActionTree::Kind::stop:
            if (!goal_satisfied(ss.state, task_.goal()))
                return invalid(path, "STOP leaf in a state that does not satisfy the goal");
            return {};
        case ActionTree::Kind::fail:
            return invalid(path, "FAIL leaf outside the outcomes of a nondeterministic action");
        default:
            break;
        }
        ActionId id = tree.action();
        if (id < 0 || id >= task_.num_actions())
            return invalid(path, "unknown action id " + std::to_string(id));
        const Action &action = task_.action(id);
        string here = path + "/" + action.name;
        if (!eval_formula(ss.state, action.precondition))
            return invalid(here, "precondition of '" + action.name + "' does not hold");
        int nd = task_.nondet_index(id);
        if (nd >= 0 && !ss.available[static_cast<size_t>(nd)])
            return invalid(here, "nondeterministic action '" + action.name + "' used twice on a path");
        if (tree.children().size() != action.outcomes.size())
            return invalid(here, "'" + action.name + "' has " + std::to_string(tree.children().size()) +
                                     " children but " + std::to_string(action.outcomes.size()) +
                                     " outcomes");
        ActionSet available = ss.available;
        if (nd >= 0)
            available[static_cast<size_t>(nd)] = false;
        bool some_success = false;
        for (size_t o = 0; o < action.outcomes.size(); ++o) {
            SearchState child{apply_outcome(ss.state, action.outcomes[o]), available};
            string child_path = here + "#" + std::to_string(o);
            const ActionTree &sub = tree.children()[o];
            if (sub.kind() == ActionTree::Kind::fail) {
                if (mode_ == Mode::strong)
                    return invalid(child_path, "FAIL leaf in a strong plan");
                if (nd < 0)
                    return invalid(child_path, "FAIL leaf below deterministic action '" + action.name + "'");
                if (!certifier_(child))
                    return invalid(child_path, "FAIL leaf on an outcome not certified unsolvable");
                continue;
            }
            ValidationReport report = check(child, sub, child_path);
            if (!report.valid)
                return report;
            some_success = true;
        }
        if (!some_success)
            return invalid(here, "all outcomes of '" + action.name + "' are FAIL");
        return {};
    }
};

void collect_fail_states(const PlanningTask &task, const SearchState &ss, const ActionTree &tree,
                         vector<SearchState> &out) {
    if (!tree.is_action())
        return;
    const Action &action = task.action(tree.action());
    ActionSet available = ss.available;
    int nd = task.nondet_index(tree.action());
    if (nd >= 0)
        available[static_cast<size_t>(nd)] = false;
    for (size_t o = 0; o < tree.children().size() && o < action.outcomes.size(); ++o) {
        SearchState child{apply_outcome(ss.state, action.outcomes[o]), available};
        if (tree.children()[o].kind() == ActionTree::Kind::fail)
            out.push_back(move(child));
        else
            collect_fail_states(task, child, tree.children()[o], out);
    }
}
} // namespace

ValidationReport validate_plan_from(const PlanningTask &task, const SearchState &root, const ActionTree &tree,
                                    Mode mode, const FailCertifier &certifier) {
    if (mode == Mode::auto_)
        throw invalid_argument("validate_plan needs strong or weak mode");
    string structure = check_tree_structure(task, tree);
    if (!structure.empty())
        return ValidationReport{false, structure, "/"};
    FailCertifier fallback = certifier ? certifier : rpg_certifier(task);
    if (tree.kind() == ActionTree::Kind::fail)
        return ValidationReport{false, "plan consists of a single FAIL node", "/"};
    return Validator(task, mode, fallback).check(root, tree, "");
}

ValidationReport validate_plan(const PlanningTask &task, const ActionTree &tree, Mode mode,
                               const FailCertifier &certifier) {
    return validate_plan_from(task, initial_search_state(task), tree, mode, certifier);
}

vector<SearchState> fail_leaf_states_from(const PlanningTask &task, const SearchState &root,
                                          const ActionTree &tree) {
    vector<SearchState> out;
    collect_fail_states(task, root, tree, out);
    return out;
}

vector<SearchState> fail_leaf_states(const PlanningTask &task, const ActionTree &tree) {
    return fail_leaf_states_from(task, initial_search_state(task), tree);
}

} // namespace sam
