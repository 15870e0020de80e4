#include "sam/heuristic.h"

#include <algorithm>
#include <set>

using namespace std;

namespace sam {

vector<DeterminizedAction> determinize(const PlanningTask &task, const ActionSet &available) {
    vector<DeterminizedAction> entries;
    for (ActionId id = 0; id < task.num_actions(); ++id) {
        int nd = task.nondet_index(id);
        if (nd >= 0 && !available[static_cast<size_t>(nd)])
            continue;
        const Action &action = task.action(id);
        vector<PartialAssignment> branches = formula_to_dnf(task, action.precondition);
        for (int o = 0; o < static_cast<int>(action.outcomes.size()); ++o)
            for (int b = 0; b < static_cast<int>(branches.size()); ++b)
                entries.push_back(DeterminizedAction{id, o, b, branches[static_cast<size_t>(b)],
                                                     action.outcomes[static_cast<size_t>(o)]});
    }
    return entries;
}

FactIndex::FactIndex(const PlanningTask &task) {
    offset_.push_back(0);
    for (const Variable &var : task.variables())
        offset_.push_back(offset_.back() + var.domain_size());
}

RpgResult build_rpg(const PlanningTask &task, const vector<DeterminizedAction> &entries,
                    const State &state) {
    FactIndex index(task);
    RpgResult rpg;
    rpg.fact_level.assign(static_cast<size_t>(index.size()), infinity);
    rpg.action_level.assign(entries.size(), infinity);

    vector<vector<int>> watchers(static_cast<size_t>(index.size()));
    vector<int> missing(entries.size());
    vector<int> triggered;
    for (size_t e = 0; e < entries.size(); ++e) {
        missing[e] = static_cast<int>(entries[e].precondition.size());
        for (const Fact &f : entries[e].precondition)
            watchers[static_cast<size_t>(index(f))].push_back(static_cast<int>(e));
        if (missing[e] == 0)
            triggered.push_back(static_cast<int>(e));
    }

    vector<Fact> layer;
    for (VarId v = 0; v < task.num_variables(); ++v) {
        Fact f{v, state[v]};
        rpg.fact_level[static_cast<size_t>(index(f))] = 0;
        layer.push_back(f);
    }

    for (int t = 0;; ++t) {
        rpg.layers.push_back(layer);
        bool goal_reached = all_of(task.goal().begin(), task.goal().end(), [&](const Fact &g) {
            return rpg.fact_level[static_cast<size_t>(index(g))] <= t;
        });
        if (goal_reached) {
            rpg.level = t;
            return rpg;
        }
        for (const Fact &f : layer)
            for (int e : watchers[static_cast<size_t>(index(f))])
                if (--missing[static_cast<size_t>(e)] == 0)
                    triggered.push_back(e);
        vector<Fact> next;
        for (int e : triggered) {
            rpg.action_level[static_cast<size_t>(e)] = t;
            for (const Fact &f : entries[static_cast<size_t>(e)].effect) {
                int &level = rpg.fact_level[static_cast<size_t>(index(f))];
                if (level == infinity) {
                    level = t + 1;
                    next.push_back(f);
                }
            }
        }
        triggered.clear();
        if (next.empty()) {
            rpg.level = infinity;
            return rpg;
        }
        sort(next.begin(), next.end());
        layer = move(next);
    }
}

RpgResult build_rpg(const PlanningTask &task, const SearchState &ss) {
    return build_rpg(task, determinize(task, ss.available), ss.state);
}

HeuristicOutcome extract_relaxed_plan(const RpgResult &rpg, const PlanningTask &task,
                                      const vector<DeterminizedAction> &entries, const State &state) {
    HeuristicOutcome out;
    if (rpg.dead_end()) {
        out.value = infinity;
        return out;
    }
    FactIndex index(task);
    auto level_of = [&](const Fact &f) { return rpg.fact_level[static_cast<size_t>(index(f))]; };

    vector<vector<Fact>> goals(static_cast<size_t>(rpg.level) + 1);
    vector<char> marked(static_cast<size_t>(index.size()), 0);
    auto add_goal = [&](const Fact &f) {
        int level = level_of(f);
        char &m = marked[static_cast<size_t>(index(f))];
        if (level > 0 && !m) {
            m = 1;
            goals[static_cast<size_t>(level)].push_back(f);
        }
    };
    for (const Fact &g : task.goal())
        add_goal(g);

    vector<int> selected;
    vector<char> achieved(static_cast<size_t>(index.size()), 0);
    for (int i = rpg.level; i > 0; --i) {
        for (const Fact &f : goals[static_cast<size_t>(i)]) {
            if (achieved[static_cast<size_t>(index(f))])
                continue;
            int best = -1;
            for (size_t e = 0; e < entries.size(); ++e) {
                int al = rpg.action_level[e];
                if (al >= i)
                    continue;
                const PartialAssignment &eff = entries[e].effect;
                if (!binary_search(eff.begin(), eff.end(), f))
                    continue;
                if (best < 0 || al < rpg.action_level[static_cast<size_t>(best)])
                    best = static_cast<int>(e);
            }
            // rpg.level finite guarantees a supporter exists.
            const DeterminizedAction &chosen = entries[static_cast<size_t>(best)];
            selected.push_back(best);
            for (const Fact &p : chosen.precondition)
                add_goal(p);
            for (const Fact &a : chosen.effect)
                if (level_of(a) == i)
                    achieved[static_cast<size_t>(index(a))] = 1;
        }
    }

    set<pair<ActionId, int>> distinct;
    set<ActionId> helpful;
    for (int e : selected) {
        const DeterminizedAction &entry = entries[static_cast<size_t>(e)];
        distinct.emplace(entry.action, entry.outcome);
        if (rpg.action_level[static_cast<size_t>(e)] == 0 && satisfies(state, entry.precondition))
            helpful.insert(entry.action);
        out.relaxed_plan.push_back(entry);
    }
    out.value = static_cast<int>(distinct.size());
    out.helpful.assign(helpful.begin(), helpful.end());
    return out;
}

string to_string(HeuristicKind kind) {
    return kind == HeuristicKind::ff ? "ff" : "blind";
}

HeuristicKind heuristic_from_string(const string &name) {
    if (name == "ff")
        return HeuristicKind::ff;
    if (name == "blind")
        return HeuristicKind::blind;
    throw invalid_argument("unknown heuristic '" + name + "'");
}

FFHeuristic::FFHeuristic(const PlanningTask &task)
    : task_(task), all_entries_(determinize(task, ActionSet(static_cast<size_t>(task.num_nondet()), true))) {}

const vector<DeterminizedAction> &FFHeuristic::filtered(const ActionSet &available) {
    scratch_.clear();
    for (const DeterminizedAction &entry : all_entries_) {
        int nd = task_.nondet_index(entry.action);
        if (nd < 0 || available[static_cast<size_t>(nd)])
            scratch_.push_back(entry);
    }
    return scratch_;
}

RpgResult FFHeuristic::rpg(const SearchState &ss) {
    return build_rpg(task_, filtered(ss.available), ss.state);
}

HeuristicOutcome FFHeuristic::evaluate(const SearchState &ss) {
    if (goal_satisfied(ss.state, task_.goal()))
        return HeuristicOutcome{};
    const vector<DeterminizedAction> &entries = filtered(ss.available);
    RpgResult rpg = build_rpg(task_, entries, ss.state);
    return extract_relaxed_plan(rpg, task_, entries, ss.state);
}

HeuristicOutcome BlindHeuristic::evaluate(const SearchState &ss) {
    HeuristicOutcome out;
    if (goal_satisfied(ss.state, task_.goal()))
        return out;
    out.value = 1;
    for (ActionId id = 0; id < task_.num_actions(); ++id)
        if (applicable(task_, ss, id))
            out.helpful.push_back(id);
    return out;
}

unique_ptr<Heuristic> make_heuristic(HeuristicKind kind, const PlanningTask &task) {
    if (kind == HeuristicKind::ff)
        return make_unique<FFHeuristic>(task);
    return make_unique<BlindHeuristic>(task);
}

HeuristicOutcome ff_h(const PlanningTask &task, const SearchState &ss) {
    return FFHeuristic(task).evaluate(ss);
}

HeuristicOutcome blind_h(const PlanningTask &task, const SearchState &ss) {
    return BlindHeuristic(task).evaluate(ss);
}

} // namespace sam
