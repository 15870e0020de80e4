#include "sam/experiments.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <map>
#include <numeric>
#include <ostream>
#include <ranges>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

using namespace std;
using json = nlohmann::json;

namespace sam {

namespace {
void combinations(int n, int k, int start, vector<int> &current, vector<vector<int>> &out) {
    if (static_cast<int>(current.size()) == k) {
        out.push_back(current);
        return;
    }
    for (int i = start; i < n; ++i) {
        current.push_back(i);
        combinations(n, k, i + 1, current, out);
        current.pop_back();
    }
}
} // namespace

vector<GeneratedInstance> generate(const vector<BusinessObject> &objects, const GeneratorSpec &spec) {
    if (spec.goal_size < 1)
        throw invalid_argument("goal size must be at least 1");
    if (spec.samples < 0)
        throw invalid_argument("samples must be positive, or 0 for all");
    mt19937_64 rng(spec.seed);
    vector<GeneratedInstance> out;
    for (const BusinessObject &object : objects) {
        if (!spec.objects.empty() &&
            find(spec.objects.begin(), spec.objects.end(), object.id) == spec.objects.end())
            continue;
        int n = static_cast<int>(object.variables.size());
        if (spec.goal_size > n)
            continue;
        vector<vector<int>> subsets;
        vector<int> current;
        combinations(n, spec.goal_size, 0, current, subsets);
        for (const vector<int> &subset : subsets) {
            uint64_t count = 1;
            for (int v : subset)
                count *= static_cast<uint64_t>(object.variables[static_cast<size_t>(v)].domain_size());
            vector<uint64_t> chosen;
            if (spec.samples == 0 || count <= static_cast<uint64_t>(spec.samples)) {
                chosen.resize(count);
                iota(chosen.begin(), chosen.end(), 0);
            } else {
                chosen.resize(static_cast<size_t>(spec.samples));
                ranges::sample(views::iota(uint64_t{0}, count), chosen.begin(), spec.samples, rng);
                ranges::sort(chosen);
            }
            for (uint64_t index : chosen) {
                GeneratedInstance instance;
                instance.object = object.id;
                instance.goal_size = spec.goal_size;
                instance.bundle.objects = objects;
                instance.bundle.scope = spec.scope;
                uint64_t rest = index;
                vector<NamedAtom> goal(subset.size());
                for (size_t k = subset.size(); k-- > 0;) {
                    const Variable &var = object.variables[static_cast<size_t>(subset[k])];
                    uint64_t size = static_cast<uint64_t>(var.domain_size());
                    goal[k] = NamedAtom{object.qualified_name(subset[k]), var.domain[rest % size], false};
                    rest /= size;
                }
                instance.bundle.goal = move(goal);
                ostringstream id;
                id << object.id << "/G" << spec.goal_size << "/" << out.size();
                instance.id = id.str();
                out.push_back(move(instance));
            }
        }
    }
    return out;
}

namespace {
class Oracle {
    const PlanningTask &task_;
    Mode mode_;
    size_t bound_;
    size_t visited_ = 0;
    unordered_map<SearchState, bool, SearchStateHash> memo_;

    void charge() {
        if (++visited_ > bound_)
            throw OracleBoundError("oracle state bound " + std::to_string(bound_) + " exceeded");
    }

    bool good(const SearchState &ss) {
        if (goal_satisfied(ss.state, task_.goal()))
            return true;
        for (ActionId id : task_.nondet_actions()) {
            if (!applicable(task_, ss, id))
                continue;
            SearchState base = ss;
            base.available[static_cast<size_t>(task_.nondet_index(id))] = false;
            bool any = false;
            bool all = true;
            for (const PartialAssignment &outcome : task_.action(id).outcomes) {
                bool ok = solvable(SearchState{apply_outcome(ss.state, outcome), base.available});
                any |= ok;
                all &= ok;
                if (mode_ == Mode::weak && ok)
                    break;
                if (mode_ == Mode::strong && !ok)
                    break;
            }
            if (mode_ == Mode::weak ? any : all)
                return true;
        }
        return false;
    }

public:
    Oracle(const PlanningTask &task, Mode mode, size_t bound) : task_(task), mode_(mode), bound_(bound) {}

    bool solvable(const SearchState &root) {
        auto hit = memo_.find(root);
        if (hit != memo_.end())
            return hit->second;
        // Closure under deterministic actions for this availability set.
        vector<SearchState> order{root};
        vector<int> parent{-1};
        unordered_map<SearchState, int, SearchStateHash> index{{root, 0}};
        for (size_t i = 0; i < order.size(); ++i) {
            charge();
            SearchState current = order[i];
            auto known = memo_.find(current);
            bool is_good = known != memo_.end() ? known->second : good(current);
            if (is_good) {
                for (int k = static_cast<int>(i); k >= 0; k = parent[static_cast<size_t>(k)])
                    memo_[order[static_cast<size_t>(k)]] = true;
                return true;
            }
            for (ActionId id = 0; id < task_.num_actions(); ++id) {
                const Action &action = task_.action(id);
                if (!action.deterministic() || !eval_formula(current.state, action.precondition))
                    continue;
                SearchState next{apply_outcome(current.state, action.outcomes.front()), current.available};
                if (index.emplace(next, static_cast<int>(order.size())).second) {
                    order.push_back(move(next));
                    parent.push_back(static_cast<int>(i));
                }
            }
        }
        for (const SearchState &ss : order)
            memo_[ss] = false;
        return false;
    }
};
} // namespace

bool oracle_solvable(const PlanningTask &task, const SearchState &ss, Mode mode, size_t bound) {
    if (mode == Mode::auto_)
        throw invalid_argument("oracle needs strong or weak mode");
    return Oracle(task, mode, bound).solvable(ss);
}

FailCertifier oracle_certifier(const PlanningTask &task, size_t bound) {
    return [&task, bound](const SearchState &ss) { return !oracle_solvable(task, ss, Mode::weak, bound); };
}

namespace {
Formula random_formula(mt19937_64 &rng, const vector<Variable> &vars, int depth) {
    uniform_int_distribution<int> pick(0, depth > 0 ? 5 : 2);
    int choice = pick(rng);
    auto atom = [&] {
        uniform_int_distribution<int> v(0, static_cast<int>(vars.size()) - 1);
        VarId var = v(rng);
        uniform_int_distribution<int> c(0, vars[static_cast<size_t>(var)].domain_size() - 1);
        return Formula::make_atom(Fact{var, static_cast<Value>(c(rng))});
    };
    if (choice <= 1)
        return atom();
    if (choice == 2)
        return Formula::make_not(atom());
    if (choice == 3)
        return Formula::make_not(random_formula(rng, vars, depth - 1));
    uniform_int_distribution<int> width(0, 3);
    vector<Formula> children;
    for (int i = width(rng); i > 0; --i)
        children.push_back(random_formula(rng, vars, depth - 1));
    return choice == 4 ? Formula::make_and(move(children)) : Formula::make_or(move(children));
}

PartialAssignment random_assignment(mt19937_64 &rng, const vector<Variable> &vars, int max_size) {
    uniform_int_distribution<int> size(1, max_size);
    vector<int> indices(vars.size());
    iota(indices.begin(), indices.end(), 0);
    shuffle(indices.begin(), indices.end(), rng);
    indices.resize(static_cast<size_t>(min(size(rng), static_cast<int>(vars.size()))));
    vector<Fact> facts;
    for (int v : indices) {
        uniform_int_distribution<int> c(0, vars[static_cast<size_t>(v)].domain_size() - 1);
        facts.push_back(Fact{v, static_cast<Value>(c(rng))});
    }
    return make_assignment(move(facts));
}
} // namespace

PlanningTask random_task(mt19937_64 &rng, const RandomTaskParams &params) {
    uniform_int_distribution<int> nvars(1, params.max_variables);
    uniform_int_distribution<int> dom(2, max(2, params.max_domain));
    vector<Variable> vars(static_cast<size_t>(nvars(rng)));
    for (size_t v = 0; v < vars.size(); ++v) {
        vars[v].name = "v" + std::to_string(v);
        int size = dom(rng);
        for (int c = 0; c < size; ++c)
            vars[v].domain.push_back("c" + std::to_string(c));
    }
    uniform_int_distribution<int> nactions(0, params.max_actions);
    uniform_real_distribution<double> unit(0.0, 1.0);
    uniform_int_distribution<int> noutcomes(2, max(2, params.max_outcomes));
    vector<Action> actions;
    int count = nactions(rng);
    for (int i = 0; i < count; ++i) {
        Action action;
        action.name = "a" + std::to_string(i);
        action.precondition = random_formula(rng, vars, 2);
        int outcomes = unit(rng) < params.nondet_probability ? noutcomes(rng) : 1;
        for (int o = 0; o < outcomes * 3 && static_cast<int>(action.outcomes.size()) < outcomes; ++o) {
            PartialAssignment eff = random_assignment(rng, vars, 2);
            if (find(action.outcomes.begin(), action.outcomes.end(), eff) == action.outcomes.end())
                action.outcomes.push_back(move(eff));
        }
        actions.push_back(move(action));
    }
    vector<Value> initial;
    for (const Variable &var : vars) {
        uniform_int_distribution<int> c(0, var.domain_size() - 1);
        initial.push_back(static_cast<Value>(c(rng)));
    }
    PartialAssignment goal = random_assignment(rng, vars, params.max_goal);
    return PlanningTask(move(vars), move(actions), State(move(initial)), move(goal));
}

vector<SuiteInstance> compile_instances(const vector<GeneratedInstance> &generated) {
    vector<SuiteInstance> out;
    for (const GeneratedInstance &g : generated)
        out.push_back(SuiteInstance{g.id, g.object, g.goal_size, compile_bo(g.bundle)});
    return out;
}

double nondet_fraction(const PlanningTask &task, const ActionTree &tree) {
    long total = 0, nondet = 0;
    auto visit = [&](auto &&self, const ActionTree &node) -> void {
        if (!node.is_action())
            return;
        ++total;
        if (!task.action(node.action()).deterministic())
            ++nondet;
        for (const ActionTree &child : node.children())
            self(self, child);
    };
    visit(visit, tree);
    return total == 0 ? 0.0 : static_cast<double>(nondet) / static_cast<double>(total);
}

SuiteResult run_suite(const vector<SuiteInstance> &instances, const vector<NamedConfig> &configs, unsigned threads) {
    size_t jobs = instances.size() * configs.size();
    vector<RunRecord> records(jobs);
    atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t job = next++; job < jobs; job = next++) {
            const SuiteInstance &instance = instances[job / configs.size()];
            const NamedConfig &config = configs[job % configs.size()];
            RunRecord &record = records[job];
            record.instance = instance.id;
            record.object = instance.object;
            record.goal_size = instance.goal_size;
            record.config = config.name;
            record.mode = config.config.mode;
            try {
                SearchResult result = solve(instance.task, config.config);
                record.verdict = result.verdict;
                record.evaluations = result.stats.evaluations;
                if (result.strong_phase && *result.strong_phase != Verdict::plan)
                    record.evaluations += result.strong_stats.evaluations;
                record.wall_time = result.stats.wall_time;
                if (result.strong_phase)
                    record.strong_phase = to_string(*result.strong_phase);
                if (result.tree) {
                    record.mode = result.plan_mode;
                    record.plan_size = result.tree->count_actions();
                    record.failed_leaves = result.tree->count_fail_leaves();
                    record.nondet_fraction = nondet_fraction(instance.task, *result.tree);
                }
            } catch (const exception &e) {
                record.verdict = Verdict::resource_limit;
                record.error = e.what();
            }
        }
    };
    if (threads == 0)
        threads = max(1u, thread::hardware_concurrency());
    threads = static_cast<unsigned>(min<size_t>(threads, max<size_t>(jobs, 1)));
    vector<thread> pool;
    for (unsigned t = 1; t < threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (thread &t : pool)
        t.join();
    SuiteResult result;
    result.records = move(records);
    result.aggregates = aggregate(result.records);
    return result;
}

json aggregate(const vector<RunRecord> &records) {
    struct Cell {
        int total = 0;
        int solved = 0;
        map<string, int> verdicts;
        double nondet_sum = 0.0;
        long evaluations = 0;
    };
    map<string, map<string, Cell>> by_goal_size, by_object;
    auto add = [](Cell &cell, const RunRecord &r) {
        ++cell.total;
        ++cell.verdicts[to_string(r.verdict)];
        cell.evaluations += r.evaluations;
        if (r.verdict == Verdict::plan) {
            ++cell.solved;
            cell.nondet_sum += r.nondet_fraction;
        }
    };
    for (const RunRecord &r : records) {
        add(by_goal_size[r.config][std::to_string(r.goal_size)], r);
        add(by_object[r.config][r.object], r);
    }
    auto dump = [](const map<string, map<string, Cell>> &table) {
        json out = json::object();
        for (const auto &[config, cells] : table)
            for (const auto &[key, cell] : cells)
                out[config][key] = json{{"instances", cell.total},
                                        {"solved", cell.solved},
                                        {"coverage", cell.total ? static_cast<double>(cell.solved) / cell.total : 0.0},
                                        {"verdicts", cell.verdicts},
                                        {"evaluations", cell.evaluations},
                                        {"mean_nondet_fraction", cell.solved ? cell.nondet_sum / cell.solved : 0.0}};
        return out;
    };
    return json{{"by_goal_size", dump(by_goal_size)}, {"by_object", dump(by_object)}, {"runs", records.size()}};
}

const char *const csv_header =
    "instance,object,goal_size,config,mode,verdict,evaluations,wall_time,plan_size,failed_leaves,nondet_fraction,"
    "strong_phase,error";

namespace {
string csv_field(const string &text) {
    if (text.find_first_of(",\"\n") == string::npos)
        return text;
    string out = "\"";
    for (char c : text)
        out += c == '"' ? string("\"\"") : string(1, c);
    return out + "\"";
}
} // namespace

void write_csv(ostream &out, const vector<RunRecord> &records) {
    out << csv_header << "\n";
    for (const RunRecord &r : records)
        out << csv_field(r.instance) << "," << csv_field(r.object) << "," << r.goal_size << ","
            << csv_field(r.config) << "," << to_string(r.mode) << "," << to_string(r.verdict) << ","
            << r.evaluations << "," << fixed << setprecision(6) << r.wall_time << "," << r.plan_size << ","
            << r.failed_leaves << "," << setprecision(4) << r.nondet_fraction << "," << r.strong_phase << ","
            << csv_field(r.error) << "\n";
}

BusinessObject rename_object(const BusinessObject &object, const string &id) {
    BusinessObject copy = object;
    copy.id = id;
    copy.name = object.name + " " + id;
    for (Variable &var : copy.variables)
        var.owner = id;
    return copy;
}

ProblemBundle combine_goals(const vector<BusinessObject> &objects, const vector<vector<NamedAtom>> &goals, size_t k) {
    if (k > objects.size() || k > goals.size())
        throw invalid_argument("k exceeds the number of objects");
    ProblemBundle bundle;
    set<string> ids;
    for (size_t i = 0; i < k; ++i) {
        if (!ids.insert(objects[i].id).second)
            throw ModelError("variable name collision: object id '" + objects[i].id + "' used twice");
        bundle.objects.push_back(objects[i]);
        bundle.goal.insert(bundle.goal.end(), goals[i].begin(), goals[i].end());
    }
    bundle.scope = ActionScope::full;
    return bundle;
}

optional<ActionTree> project_plan(const PlanningTask &task, const ActionTree &tree, const string &owner,
                                  const PlanningTask &target) {
    auto local_name = [&](const string &name) {
        string prefix = owner + ": ";
        return name.rfind(prefix, 0) == 0 ? name.substr(prefix.size()) : name;
    };
    auto project = [&](auto &&self, const ActionTree &node) -> optional<ActionTree> {
        if (!node.is_action())
            return node;
        const Action &action = task.action(node.action());
        if (action.owner != owner) {
            for (const ActionTree &child : node.children())
                if (child.kind() != ActionTree::Kind::fail)
                    return self(self, child);
            return nullopt;
        }
        ActionId mapped = target.find_action(local_name(action.name));
        if (mapped < 0)
            return nullopt;
        vector<ActionTree> children;
        for (const ActionTree &child : node.children()) {
            optional<ActionTree> sub = self(self, child);
            if (!sub)
                return nullopt;
            children.push_back(move(*sub));
        }
        return ActionTree::make_action(mapped, move(children));
    };
    return project(project, tree);
}

vector<pair<filesystem::path, filesystem::path>> find_pddl_pairs(const filesystem::path &root) {
    vector<pair<filesystem::path, filesystem::path>> out;
    if (!filesystem::is_directory(root))
        return out;
    vector<filesystem::path> files;
    for (const auto &entry : filesystem::recursive_directory_iterator(root))
        if (entry.is_regular_file() && entry.path().extension() == ".pddl")
            files.push_back(entry.path());
    sort(files.begin(), files.end());
    for (const filesystem::path &file : files) {
        string stem = file.stem().string();
        if (stem == "domain" || stem.ends_with("-domain") || stem.ends_with("_domain"))
            continue;
        filesystem::path own = file.parent_path() / (stem + "-domain.pddl");
        filesystem::path shared = file.parent_path() / "domain.pddl";
        if (filesystem::exists(own))
            out.emplace_back(own, file);
        else if (filesystem::exists(shared))
            out.emplace_back(shared, file);
    }
    return out;
}

string read_text_file(const filesystem::path &path) {
    ifstream in(path, ios::binary);
    if (!in)
        throw runtime_error("cannot open " + path.string());
    ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace sam
