#include "sam/task_io.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

using namespace std;
using nlohmann::json;

namespace sam {

namespace {
void require_object(const json &doc, const string &path, initializer_list<const char *> allowed) {
    if (!doc.is_object())
        throw SchemaError(path, "expected an object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        bool known = any_of(allowed.begin(), allowed.end(),
                            [&](const char *key) { return it.key() == key; });
        if (!known)
            throw SchemaError(path + "." + it.key(), "unknown field");
    }
}

const json &require_field(const json &doc, const string &path, const char *key) {
    auto it = doc.find(key);
    if (it == doc.end())
        throw SchemaError(path + "." + key, "missing field");
    return *it;
}

string require_string(const json &doc, const string &path) {
    if (!doc.is_string())
        throw SchemaError(path, "expected a string");
    return doc.get<string>();
}

const json &require_array(const json &doc, const string &path) {
    if (!doc.is_array())
        throw SchemaError(path, "expected an array");
    return doc;
}

string indexed(const string &path, size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

// Resolves atoms inside one object: local name, or qualified with the object id.
class ObjectScope {
    const BusinessObject &object_;

public:
    explicit ObjectScope(const BusinessObject &object) : object_(object) {}

    VarId variable(const string &name, const string &path) const {
        for (VarId v = 0; v < static_cast<VarId>(object_.variables.size()); ++v) {
            const string &local = object_.variables[static_cast<size_t>(v)].name;
            if (name == local || name == object_.qualified_name(v))
                return v;
        }
        throw SchemaError(path, "unknown variable '" + name + "' in object '" + object_.id + "'");
    }

    Fact fact(const json &doc, const string &path) const {
        require_object(doc, path, {"var", "val"});
        VarId var = variable(require_string(require_field(doc, path, "var"), path + ".var"), path + ".var");
        string value = require_string(require_field(doc, path, "val"), path + ".val");
        const auto &domain = object_.variables[static_cast<size_t>(var)].domain;
        auto it = find(domain.begin(), domain.end(), value);
        if (it == domain.end())
            throw SchemaError(path + ".val", "value '" + value + "' not in the domain of '" +
                                                 object_.variables[static_cast<size_t>(var)].name + "'");
        return Fact{var, static_cast<Value>(it - domain.begin())};
    }

    Formula formula(const json &doc, const string &path) const {
        if (doc.is_boolean())
            return doc.get<bool>() ? Formula::top() : Formula::bottom();
        if (!doc.is_object())
            throw SchemaError(path, "expected a formula object");
        if (doc.contains("and") || doc.contains("or")) {
            const char *key = doc.contains("and") ? "and" : "or";
            require_object(doc, path, {key});
            const json &items = require_array(doc.at(key), path + "." + key);
            vector<Formula> children;
            for (size_t i = 0; i < items.size(); ++i)
                children.push_back(formula(items[i], indexed(path + "." + key, i)));
            return string(key) == "and" ? Formula::make_and(move(children))
                                        : Formula::make_or(move(children));
        }
        if (doc.contains("not")) {
            require_object(doc, path, {"not"});
            return Formula::make_not(formula(doc.at("not"), path + ".not"));
        }
        return Formula::make_atom(fact(doc, path));
    }

    json to_json(const Fact &fact) const {
        const Variable &var = object_.variables[static_cast<size_t>(fact.var)];
        return json{{"var", var.name}, {"val", var.domain[fact.value]}};
    }

    json to_json(const Formula &formula) const {
        switch (formula.kind()) {
        case Formula::Kind::atom:
            return to_json(formula.atom());
        case Formula::Kind::negation:
            return json{{"not", to_json(formula.children().front())}};
        case Formula::Kind::conjunction:
        case Formula::Kind::disjunction: {
            json items = json::array();
            for (const Formula &child : formula.children())
                items.push_back(to_json(child));
            return json{{formula.kind() == Formula::Kind::conjunction ? "and" : "or", items}};
        }
        }
        return json();
    }
};

BusinessObject object_from_json(const json &doc, const string &path) {
    require_object(doc, path, {"id", "name", "variables", "actions"});
    BusinessObject object;
    object.id = require_string(require_field(doc, path, "id"), path + ".id");
    object.name = doc.contains("name") ? require_string(doc.at("name"), path + ".name") : object.id;

    const json &vars = require_array(require_field(doc, path, "variables"), path + ".variables");
    set<string> names;
    for (size_t i = 0; i < vars.size(); ++i) {
        string vpath = indexed(path + ".variables", i);
        require_object(vars[i], vpath, {"name", "domain", "initial"});
        Variable var;
        var.name = require_string(require_field(vars[i], vpath, "name"), vpath + ".name");
        var.owner = object.id;
        if (!names.insert(var.name).second)
            throw SchemaError(vpath + ".name", "duplicate variable '" + var.name + "'");
        const json &domain = require_array(require_field(vars[i], vpath, "domain"), vpath + ".domain");
        if (domain.empty())
            throw SchemaError(vpath + ".domain", "domain must not be empty");
        for (size_t j = 0; j < domain.size(); ++j) {
            string value = require_string(domain[j], indexed(vpath + ".domain", j));
            if (find(var.domain.begin(), var.domain.end(), value) != var.domain.end())
                throw SchemaError(indexed(vpath + ".domain", j), "duplicate value '" + value + "'");
            var.domain.push_back(value);
        }
        string initial = vars[i].contains("initial")
                             ? require_string(vars[i].at("initial"), vpath + ".initial")
                             : var.domain.front();
        auto it = find(var.domain.begin(), var.domain.end(), initial);
        if (it == var.domain.end())
            throw SchemaError(vpath + ".initial", "initial value '" + initial + "' not in domain");
        object.initial.push_back(static_cast<Value>(it - var.domain.begin()));
        object.variables.push_back(move(var));
    }

    ObjectScope scope(object);
    const json empty = json::array();
    const json &actions = doc.contains("actions") ? require_array(doc.at("actions"), path + ".actions") : empty;
    for (size_t i = 0; i < actions.size(); ++i) {
        string apath = indexed(path + ".actions", i);
        require_object(actions[i], apath, {"name", "pre", "eff"});
        BusinessObject::StatusAction action;
        action.name = require_string(require_field(actions[i], apath, "name"), apath + ".name");
        action.precondition = actions[i].contains("pre") ? scope.formula(actions[i].at("pre"), apath + ".pre")
                                                         : Formula::top();
        const json &eff = require_array(require_field(actions[i], apath, "eff"), apath + ".eff");
        if (eff.empty())
            throw SchemaError(apath + ".eff", "effect needs at least one disjunct");
        for (size_t j = 0; j < eff.size(); ++j) {
            string dpath = indexed(apath + ".eff", j);
            const json &conj = require_array(eff[j], dpath);
            vector<Fact> facts;
            for (size_t k = 0; k < conj.size(); ++k)
                facts.push_back(scope.fact(conj[k], indexed(dpath, k)));
            try {
                action.effect.push_back(make_assignment(move(facts)));
            } catch (const ModelError &) {
                throw SchemaError(dpath, "contradictory effect disjunct");
            }
        }
        object.actions.push_back(move(action));
    }
    return object;
}

json object_to_json(const BusinessObject &object) {
    ObjectScope scope(object);
    json vars = json::array();
    for (size_t v = 0; v < object.variables.size(); ++v) {
        const Variable &var = object.variables[v];
        vars.push_back({{"name", var.name}, {"domain", var.domain}, {"initial", var.domain[object.initial[v]]}});
    }
    json actions = json::array();
    for (const auto &action : object.actions) {
        json eff = json::array();
        for (const PartialAssignment &disjunct : action.effect) {
            json conj = json::array();
            for (const Fact &fact : disjunct)
                conj.push_back(scope.to_json(fact));
            eff.push_back(conj);
        }
        actions.push_back({{"name", action.name}, {"pre", scope.to_json(action.precondition)}, {"eff", eff}});
    }
    return json{{"id", object.id}, {"name", object.name}, {"variables", vars}, {"actions", actions}};
}

Formula shift(const Formula &formula, VarId offset) {
    switch (formula.kind()) {
    case Formula::Kind::atom:
        return Formula::make_atom(Fact{formula.atom().var + offset, formula.atom().value});
    case Formula::Kind::negation:
        return Formula::make_not(shift(formula.children().front(), offset));
    default: {
        vector<Formula> children;
        for (const Formula &child : formula.children())
            children.push_back(shift(child, offset));
        return formula.kind() == Formula::Kind::conjunction ? Formula::make_and(move(children))
                                                            : Formula::make_or(move(children));
    }
    }
}

PartialAssignment shift(const PartialAssignment &facts, VarId offset) {
    PartialAssignment out;
    for (const Fact &fact : facts)
        out.push_back(Fact{fact.var + offset, fact.value});
    return out;
}

Formula unshift(const Formula &formula, VarId offset) { return shift(formula, -offset); }
} // namespace

string BusinessObject::qualified_name(VarId var) const {
    const string &local = variables[static_cast<size_t>(var)].name;
    return id.empty() ? local : id + "." + local;
}

PlanningTask compile_bo(const vector<BusinessObject> &objects, const vector<NamedAtom> &goal,
                        const vector<NamedAtom> &overrides, ActionScope scope,
                        vector<string> *warnings) {
    vector<Variable> variables;
    vector<Value> initial;
    vector<VarId> offsets;
    map<string, VarId> by_name;
    set<string> ids;
    for (const BusinessObject &object : objects) {
        if (!ids.insert(object.id).second)
            throw ModelError("duplicate business object id '" + object.id + "'");
        offsets.push_back(static_cast<VarId>(variables.size()));
        for (VarId v = 0; v < static_cast<VarId>(object.variables.size()); ++v) {
            Variable var = object.variables[static_cast<size_t>(v)];
            var.name = object.qualified_name(v);
            var.owner = object.id;
            if (!by_name.emplace(var.name, static_cast<VarId>(variables.size())).second)
                throw ModelError("variable name collision: '" + var.name + "'");
            variables.push_back(move(var));
            initial.push_back(object.initial[static_cast<size_t>(v)]);
        }
    }

    auto resolve = [&](const NamedAtom &atom, const string &what) -> Fact {
        auto it = by_name.find(atom.var);
        if (it == by_name.end())
            throw ModelError(what + " references unknown variable '" + atom.var + "'");
        const auto &domain = variables[static_cast<size_t>(it->second)].domain;
        auto pos = find(domain.begin(), domain.end(), atom.value);
        if (atom.value == unset_value || pos == domain.end())
            throw ModelError(what + " references unknown value '" + atom.value + "' of '" + atom.var + "'");
        return Fact{it->second, static_cast<Value>(pos - domain.begin())};
    };

    vector<Fact> goal_facts;
    set<string> relevant_owners;
    for (const NamedAtom &atom : goal) {
        if (atom.unset)
            throw ModelError("goal atoms cannot be unset");
        Fact fact = resolve(atom, "goal");
        goal_facts.push_back(fact);
        relevant_owners.insert(variables[static_cast<size_t>(fact.var)].owner);
    }
    PartialAssignment goal_assignment;
    try {
        goal_assignment = make_assignment(goal_facts);
    } catch (const ModelError &) {
        throw ModelError("goal assigns a variable two different values");
    }

    for (const NamedAtom &atom : overrides) {
        if (atom.unset) {
            auto it = by_name.find(atom.var);
            if (it == by_name.end())
                throw ModelError("initial override references unknown variable '" + atom.var + "'");
            Variable &var = variables[static_cast<size_t>(it->second)];
            auto pos = find(var.domain.begin(), var.domain.end(), unset_value);
            if (pos == var.domain.end()) {
                var.domain.push_back(unset_value);
                pos = var.domain.end() - 1;
            }
            initial[static_cast<size_t>(it->second)] = static_cast<Value>(pos - var.domain.begin());
        } else {
            Fact fact = resolve(atom, "initial override");
            initial[static_cast<size_t>(fact.var)] = fact.value;
        }
    }

    vector<Action> actions;
    set<string> seen_names;
    map<string, int> name_count;
    for (size_t o = 0; o < objects.size(); ++o)
        for (const auto &action : objects[o].actions)
            ++name_count[action.name];
    for (size_t o = 0; o < objects.size(); ++o) {
        const BusinessObject &object = objects[o];
        if (scope == ActionScope::bo_relevant && !relevant_owners.count(object.id))
            continue;
        for (const auto &source : object.actions) {
            Action action;
            action.name = name_count[source.name] > 1 ? object.id + ": " + source.name : source.name;
            action.owner = object.id;
            action.precondition = shift(source.precondition, offsets[o]);
            for (const PartialAssignment &disjunct : source.effect) {
                PartialAssignment outcome = shift(disjunct, offsets[o]);
                if (find(action.outcomes.begin(), action.outcomes.end(), outcome) != action.outcomes.end()) {
                    if (warnings)
                        warnings->push_back("action '" + action.name + "': duplicate effect disjunct dropped");
                    continue;
                }
                action.outcomes.push_back(move(outcome));
            }
            if (!seen_names.insert(action.name).second)
                throw ModelError("duplicate action name '" + action.name + "' in object '" + object.id + "'");
            actions.push_back(move(action));
        }
    }
    return PlanningTask(move(variables), move(actions), State(move(initial)), move(goal_assignment));
}

PlanningTask compile_bo(const ProblemBundle &bundle, vector<string> *warnings) {
    return compile_bo(bundle.objects, bundle.goal, bundle.init_overrides, bundle.scope, warnings);
}

vector<BusinessObject> objects_from_json(const json &doc) {
    require_object(doc, "$", {"objects"});
    const json &items = require_array(require_field(doc, "$", "objects"), "$.objects");
    vector<BusinessObject> objects;
    for (size_t i = 0; i < items.size(); ++i)
        objects.push_back(object_from_json(items[i], indexed("$.objects", i)));
    return objects;
}

json objects_to_json(const vector<BusinessObject> &objects) {
    json items = json::array();
    for (const BusinessObject &object : objects)
        items.push_back(object_to_json(object));
    return json{{"objects", items}};
}

NamedAtom atom_from_json(const json &doc, const string &path) {
    if (doc.is_object() && doc.contains("unset")) {
        require_object(doc, path, {"var", "unset"});
        if (!doc.at("unset").is_boolean() || !doc.at("unset").get<bool>())
            throw SchemaError(path + ".unset", "expected true");
        return NamedAtom{require_string(require_field(doc, path, "var"), path + ".var"), "", true};
    }
    require_object(doc, path, {"var", "val"});
    return NamedAtom{require_string(require_field(doc, path, "var"), path + ".var"),
                     require_string(require_field(doc, path, "val"), path + ".val"), false};
}

json atom_to_json(const NamedAtom &atom) {
    if (atom.unset)
        return json{{"var", atom.var}, {"unset", true}};
    return json{{"var", atom.var}, {"val", atom.value}};
}

string to_string(ActionScope scope) {
    return scope == ActionScope::full ? "full" : "bo_relevant";
}

namespace {
void read_problem_fields(const json &doc, const string &path, ProblemBundle &bundle) {
    if (doc.contains("goal")) {
        const json &items = require_array(doc.at("goal"), path + ".goal");
        for (size_t i = 0; i < items.size(); ++i) {
            NamedAtom atom = atom_from_json(items[i], indexed(path + ".goal", i));
            if (atom.unset)
                throw SchemaError(indexed(path + ".goal", i), "goal atoms cannot be unset");
            bundle.goal.push_back(atom);
        }
    }
    if (doc.contains("init_overrides")) {
        const json &items = require_array(doc.at("init_overrides"), path + ".init_overrides");
        for (size_t i = 0; i < items.size(); ++i)
            bundle.init_overrides.push_back(atom_from_json(items[i], indexed(path + ".init_overrides", i)));
    }
    if (doc.contains("scope")) {
        string scope = require_string(doc.at("scope"), path + ".scope");
        if (scope == "full")
            bundle.scope = ActionScope::full;
        else if (scope == "bo_relevant")
            bundle.scope = ActionScope::bo_relevant;
        else
            throw SchemaError(path + ".scope", "expected \"full\" or \"bo_relevant\"");
    }
}
} // namespace

void problem_from_json(const json &doc, ProblemBundle &bundle) {
    require_object(doc, "$", {"goal", "init_overrides", "scope"});
    read_problem_fields(doc, "$", bundle);
}

json problem_to_json(const ProblemBundle &bundle) {
    json goal = json::array();
    for (const NamedAtom &atom : bundle.goal)
        goal.push_back(atom_to_json(atom));
    json overrides = json::array();
    for (const NamedAtom &atom : bundle.init_overrides)
        overrides.push_back(atom_to_json(atom));
    return json{{"goal", goal}, {"init_overrides", overrides}, {"scope", to_string(bundle.scope)}};
}

ProblemBundle bundle_from_json(const json &doc) {
    require_object(doc, "$", {"objects", "goal", "init_overrides", "scope"});
    ProblemBundle bundle;
    bundle.objects = objects_from_json(json{{"objects", require_field(doc, "$", "objects")}});
    read_problem_fields(doc, "$", bundle);
    return bundle;
}

ProblemBundle task_to_bundle(const PlanningTask &task) {
    ProblemBundle bundle;
    vector<VarId> offsets;
    map<string, size_t> object_index;
    auto object_for = [&](const string &owner) -> size_t {
        auto it = object_index.find(owner);
        if (it != object_index.end()) {
            if (it->second + 1 != bundle.objects.size())
                throw ModelError("task interleaves owners; not representable as business objects");
            return it->second;
        }
        object_index[owner] = bundle.objects.size();
        BusinessObject object;
        object.id = owner;
        object.name = owner;
        bundle.objects.push_back(move(object));
        return bundle.objects.size() - 1;
    };

    vector<size_t> owner_of(static_cast<size_t>(task.num_variables()));
    vector<VarId> local_of(static_cast<size_t>(task.num_variables()));
    for (VarId v = 0; v < task.num_variables(); ++v) {
        const Variable &source = task.variable(v);
        size_t o = object_for(source.owner);
        BusinessObject &object = bundle.objects[o];
        Variable var = source;
        if (!source.owner.empty()) {
            string prefix = source.owner + ".";
            if (source.name.rfind(prefix, 0) != 0)
                throw ModelError("variable '" + source.name + "' lacks its owner prefix");
            var.name = source.name.substr(prefix.size());
        }
        var.owner.clear();
        owner_of[static_cast<size_t>(v)] = o;
        local_of[static_cast<size_t>(v)] = static_cast<VarId>(object.variables.size());
        object.variables.push_back(move(var));
        object.initial.push_back(task.initial()[v]);
    }
    offsets.assign(bundle.objects.size(), 0);
    for (VarId v = task.num_variables() - 1; v >= 0; --v)
        offsets[owner_of[static_cast<size_t>(v)]] = v;

    size_t last_object = 0;
    for (const Action &action : task.actions()) {
        auto it = object_index.find(action.owner);
        if (it == object_index.end()) {
            object_index[action.owner] = bundle.objects.size();
            BusinessObject object;
            object.id = action.owner;
            object.name = action.owner;
            bundle.objects.push_back(move(object));
            offsets.push_back(0);
            it = object_index.find(action.owner);
        }
        size_t o = it->second;
        if (o < last_object)
            throw ModelError("task interleaves action owners; not representable as business objects");
        last_object = o;
        auto check_local = [&](VarId var) {
            if (owner_of[static_cast<size_t>(var)] != o)
                throw ModelError("action '" + action.name + "' references another object's variable");
        };
        for (VarId var : formula_variables(action.precondition))
            check_local(var);
        BusinessObject::StatusAction local;
        local.name = action.name;
        local.precondition = unshift(action.precondition, offsets[o]);
        for (const PartialAssignment &outcome : action.outcomes) {
            for (const Fact &fact : outcome)
                check_local(fact.var);
            local.effect.push_back(shift(outcome, -offsets[o]));
        }
        bundle.objects[o].actions.push_back(move(local));
    }
    (void)local_of;

    for (const Fact &fact : task.goal())
        bundle.goal.push_back(NamedAtom{task.variable(fact.var).name,
                                        task.variable(fact.var).domain[fact.value], false});
    bundle.scope = ActionScope::full;
    return bundle;
}

json task_to_json(const PlanningTask &task) {
    ProblemBundle bundle = task_to_bundle(task);
    json doc = objects_to_json(bundle.objects);
    json problem = problem_to_json(bundle);
    doc["goal"] = problem["goal"];
    doc["init_overrides"] = problem["init_overrides"];
    doc["scope"] = problem["scope"];
    return doc;
}

PlanningTask task_from_json(const json &doc) {
    return compile_bo(bundle_from_json(doc));
}

json read_json_file(const filesystem::path &path) {
    ifstream in(path);
    if (!in)
        throw runtime_error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw SchemaError(path.string(), e.what());
    }
}

void write_task(const PlanningTask &task, const filesystem::path &path) {
    ofstream out(path);
    if (!out)
        throw runtime_error("cannot write " + path.string());
    out << task_to_json(task).dump(2) << "\n";
}

PlanningTask read_task(const filesystem::path &path) {
    return task_from_json(read_json_file(path));
}

json plan_to_json(const PlanningTask &task, const ActionTree &tree) {
    switch (tree.kind()) {
    case ActionTree::Kind::stop:
        return "STOP";
    case ActionTree::Kind::fail:
        return "FAIL";
    case ActionTree::Kind::action: {
        json children = json::array();
        for (const ActionTree &child : tree.children())
            children.push_back(plan_to_json(task, child));
        return json{{"action", task.action(tree.action()).name}, {"children", children}};
    }
    }
    return json();
}

namespace {
ActionTree plan_from_json_at(const PlanningTask &task, const json &doc, const string &path) {
    if (doc.is_string()) {
        string leaf = doc.get<string>();
        if (leaf == "STOP")
            return ActionTree::stop();
        if (leaf == "FAIL")
            return ActionTree::fail();
        throw SchemaError(path, "expected \"STOP\", \"FAIL\" or an action node");
    }
    require_object(doc, path, {"action", "children"});
    string name = require_string(require_field(doc, path, "action"), path + ".action");
    ActionId id = task.find_action(name);
    if (id < 0)
        throw SchemaError(path + ".action", "unknown action '" + name + "'");
    const json &items = require_array(require_field(doc, path, "children"), path + ".children");
    vector<ActionTree> children;
    for (size_t i = 0; i < items.size(); ++i)
        children.push_back(plan_from_json_at(task, items[i], indexed(path + ".children", i)));
    return ActionTree::make_action(id, move(children));
}
} // namespace

ActionTree plan_from_json(const PlanningTask &task, const json &doc) {
    return plan_from_json_at(task, doc, "$");
}

} // namespace sam
