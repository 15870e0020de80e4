#include "sam/pddl.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

using namespace std;

namespace sam {

namespace {
struct SExpr {
    bool is_list = false;
    string text;
    vector<SExpr> items;
    int line = 1;
    int column = 1;

    bool is_symbol() const { return !is_list; }
    bool head_is(const string &keyword) const;
};

string lower(string s) {
    transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(tolower(c)); });
    return s;
}

bool SExpr::head_is(const string &keyword) const {
    return is_list && !items.empty() && items.front().is_symbol() && lower(items.front().text) == keyword;
}

[[noreturn]] void fail(const SExpr &at, const string &message) {
    throw PddlError(at.line, at.column, message);
}

class Reader {
    const string &text_;
    size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            if (isspace(static_cast<unsigned char>(text_[pos_]))) {
                advance();
            } else if (text_[pos_] == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    advance();
            } else {
                break;
            }
        }
    }

    SExpr read() {
        skip_space();
        if (pos_ >= text_.size())
            throw PddlError(line_, column_, "unexpected end of input");
        SExpr expr;
        expr.line = line_;
        expr.column = column_;
        if (text_[pos_] == ')')
            throw PddlError(line_, column_, "unexpected ')'");
        if (text_[pos_] == '(') {
            advance();
            expr.is_list = true;
            while (true) {
                skip_space();
                if (pos_ >= text_.size())
                    throw PddlError(expr.line, expr.column, "unbalanced '(' opened here");
                if (text_[pos_] == ')') {
                    advance();
                    break;
                }
                expr.items.push_back(read());
            }
            return expr;
        }
        while (pos_ < text_.size() && !isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != ';') {
            expr.text += text_[pos_];
            advance();
        }
        return expr;
    }

public:
    explicit Reader(const string &text) : text_(text) {}

    SExpr read_document() {
        SExpr doc = read();
        skip_space();
        if (pos_ < text_.size())
            throw PddlError(line_, column_, "trailing content after definition");
        return doc;
    }
};

struct TypedName {
    string name;
    vector<string> types;
};

vector<TypedName> parse_typed_list(const SExpr &list, size_t start) {
    vector<TypedName> result;
    size_t pending = result.size();
    for (size_t i = start; i < list.items.size(); ++i) {
        const SExpr &item = list.items[i];
        if (item.is_symbol() && item.text == "-") {
            if (i + 1 >= list.items.size())
                fail(item, "type expected after '-'");
            const SExpr &type = list.items[++i];
            vector<string> types;
            if (type.head_is("either")) {
                for (size_t k = 1; k < type.items.size(); ++k)
                    types.push_back(type.items[k].text);
            } else if (type.is_symbol()) {
                types.push_back(type.text);
            } else {
                fail(type, "malformed type");
            }
            for (size_t k = pending; k < result.size(); ++k)
                result[k].types = types;
            pending = result.size();
        } else if (item.is_symbol()) {
            result.push_back(TypedName{item.text, {"object"}});
        } else {
            fail(item, "expected a name");
        }
    }
    return result;
}

struct Schema {
    string name;
    vector<TypedName> parameters;
    const SExpr *precondition = nullptr;
    const SExpr *effect = nullptr;
    SExpr where;
};

struct GroundFormula {
    enum class Kind { atom, negation, conjunction, disjunction };
    Kind kind = Kind::conjunction;
    string atom;
    vector<GroundFormula> children;
};

struct GroundOutcome {
    set<string> adds;
    set<string> dels;
    friend bool operator==(const GroundOutcome &, const GroundOutcome &) = default;
};

struct GroundAction {
    string name;
    GroundFormula precondition;
    vector<GroundOutcome> outcomes;
};

class Grounder {
public:
    map<string, string> type_parent;
    vector<pair<string, string>> objects; // name, type
    vector<string> predicate_order;
    map<string, size_t> predicate_arity;
    bool predicates_declared = false;
    vector<Schema> schemas;
    vector<string> atom_order;
    set<string> known_atoms;
    set<string> nullary_atoms;

    void note_atom(const string &atom) {
        if (known_atoms.insert(atom).second)
            atom_order.push_back(atom);
    }

    bool is_subtype(string type, const string &ancestor) const {
        if (ancestor == "object")
            return true;
        for (int guard = 0; guard < 1000; ++guard) {
            if (type == ancestor)
                return true;
            auto it = type_parent.find(type);
            if (it == type_parent.end())
                return false;
            type = it->second;
        }
        return false;
    }

    vector<string> objects_of(const vector<string> &types) const {
        vector<string> result;
        for (const auto &[name, type] : objects)
            for (const string &t : types)
                if (is_subtype(type, t)) {
                    result.push_back(name);
                    break;
                }
        return result;
    }

    string ground_atom(const SExpr &expr, const map<string, string> &binding) {
        if (!expr.is_list || expr.items.empty() || !expr.items.front().is_symbol())
            fail(expr, "expected an atom");
        string name = expr.items.front().text;
        auto it = predicate_arity.find(name);
        if (predicates_declared && it == predicate_arity.end())
            fail(expr, "undeclared predicate '" + name + "'");
        if (it != predicate_arity.end() && it->second != expr.items.size() - 1)
            fail(expr, "predicate '" + name + "' used with wrong arity");
        string atom = name;
        if (expr.items.size() == 1)
            nullary_atoms.insert(atom);
        for (size_t i = 1; i < expr.items.size(); ++i) {
            const SExpr &arg = expr.items[i];
            if (!arg.is_symbol())
                fail(arg, "nested term not supported");
            string value = arg.text;
            if (!value.empty() && value[0] == '?') {
                auto b = binding.find(value);
                if (b == binding.end())
                    fail(arg, "unbound parameter " + value);
                value = b->second;
            }
            atom += "_" + value;
        }
        return atom;
    }

    string term(const SExpr &arg, const map<string, string> &binding) {
        if (!arg.is_symbol())
            fail(arg, "nested term not supported");
        if (!arg.text.empty() && arg.text[0] == '?') {
            auto b = binding.find(arg.text);
            if (b == binding.end())
                fail(arg, "unbound parameter " + arg.text);
            return b->second;
        }
        return arg.text;
    }

    GroundFormula ground_formula(const SExpr &expr, const map<string, string> &binding) {
        GroundFormula f;
        if (!expr.is_list)
            fail(expr, "expected a formula");
        if (expr.items.empty()) {
            f.kind = GroundFormula::Kind::conjunction;
            return f;
        }
        string head = expr.items.front().is_symbol() ? lower(expr.items.front().text) : "";
        if (head == "and" || head == "or") {
            f.kind = head == "and" ? GroundFormula::Kind::conjunction : GroundFormula::Kind::disjunction;
            for (size_t i = 1; i < expr.items.size(); ++i)
                f.children.push_back(ground_formula(expr.items[i], binding));
            return f;
        }
        if (head == "not") {
            if (expr.items.size() != 2)
                fail(expr, "'not' takes one operand");
            f.kind = GroundFormula::Kind::negation;
            f.children.push_back(ground_formula(expr.items[1], binding));
            return f;
        }
        if (head == "imply") {
            if (expr.items.size() != 3)
                fail(expr, "'imply' takes two operands");
            GroundFormula negated;
            negated.kind = GroundFormula::Kind::negation;
            negated.children.push_back(ground_formula(expr.items[1], binding));
            f.kind = GroundFormula::Kind::disjunction;
            f.children.push_back(move(negated));
            f.children.push_back(ground_formula(expr.items[2], binding));
            return f;
        }
        if (head == "forall" || head == "exists")
            fail(expr, "unsupported construct '" + head + "' (quantified precondition)");
        if (head == "=") {
            if (expr.items.size() != 3)
                fail(expr, "'=' takes two terms");
            bool equal = term(expr.items[1], binding) == term(expr.items[2], binding);
            f.kind = equal ? GroundFormula::Kind::conjunction : GroundFormula::Kind::disjunction;
            return f;
        }
        if (head == "<" || head == ">" || head == "<=" || head == ">=")
            fail(expr, "unsupported construct '" + head + "' (numeric fluents)");
        f.kind = GroundFormula::Kind::atom;
        f.atom = ground_atom(expr, binding);
        note_atom(f.atom);
        return f;
    }

    void add_literals(const SExpr &expr, const map<string, string> &binding, GroundOutcome &out) {
        if (!expr.is_list)
            fail(expr, "expected an effect");
        if (expr.items.empty())
            return;
        string head = expr.items.front().is_symbol() ? lower(expr.items.front().text) : "";
        if (head == "and") {
            for (size_t i = 1; i < expr.items.size(); ++i)
                add_literals(expr.items[i], binding, out);
            return;
        }
        if (head == "not") {
            if (expr.items.size() != 2)
                fail(expr, "'not' takes one operand");
            string atom = ground_atom(expr.items[1], binding);
            note_atom(atom);
            out.dels.insert(atom);
            return;
        }
        if (head == "oneof")
            fail(expr, "unsupported construct 'oneof' below the top level of an effect");
        if (head == "when")
            fail(expr, "unsupported construct 'when' (conditional effect)");
        if (head == "forall")
            fail(expr, "unsupported construct 'forall' (quantified effect)");
        if (head == "increase" || head == "decrease" || head == "assign" || head == "scale-up" ||
            head == "scale-down")
            fail(expr, "unsupported construct '" + head + "' (numeric fluents)");
        string atom = ground_atom(expr, binding);
        note_atom(atom);
        out.adds.insert(atom);
    }

    vector<GroundOutcome> ground_effect(const SExpr &expr, const map<string, string> &binding) {
        // Shapes: literals, (oneof B...), or (and literals... (oneof B...)).
        const SExpr *oneof = nullptr;
        GroundOutcome common;
        if (expr.head_is("oneof")) {
            oneof = &expr;
        } else if (expr.head_is("and")) {
            for (size_t i = 1; i < expr.items.size(); ++i) {
                if (expr.items[i].head_is("oneof")) {
                    if (oneof)
                        fail(expr.items[i], "unsupported construct: more than one 'oneof' in an effect");
                    oneof = &expr.items[i];
                } else {
                    add_literals(expr.items[i], binding, common);
                }
            }
        } else {
            add_literals(expr, binding, common);
        }
        vector<GroundOutcome> outcomes;
        if (!oneof) {
            outcomes.push_back(common);
            return outcomes;
        }
        if (oneof->items.size() < 2)
            fail(*oneof, "'oneof' needs at least one branch");
        for (size_t i = 1; i < oneof->items.size(); ++i) {
            GroundOutcome branch = common;
            add_literals(oneof->items[i], binding, branch);
            if (find(outcomes.begin(), outcomes.end(), branch) == outcomes.end())
                outcomes.push_back(move(branch));
        }
        return outcomes;
    }

    vector<GroundAction> ground_all() {
        vector<GroundAction> result;
        for (const Schema &schema : schemas) {
            vector<vector<string>> candidates;
            for (const TypedName &param : schema.parameters)
                candidates.push_back(objects_of(param.types));
            vector<size_t> index(candidates.size(), 0);
            bool empty = any_of(candidates.begin(), candidates.end(), [](const auto &c) { return c.empty(); });
            while (!empty) {
                map<string, string> binding;
                string name = schema.name;
                for (size_t i = 0; i < candidates.size(); ++i) {
                    binding[schema.parameters[i].name] = candidates[i][index[i]];
                    name += " " + candidates[i][index[i]];
                }
                GroundAction action;
                action.name = name;
                if (schema.precondition)
                    action.precondition = ground_formula(*schema.precondition, binding);
                if (schema.effect)
                    action.outcomes = ground_effect(*schema.effect, binding);
                else
                    action.outcomes.push_back(GroundOutcome{});
                result.push_back(move(action));
                size_t k = 0;
                while (k < index.size() && ++index[k] == candidates[k].size())
                    index[k++] = 0;
                if (k == index.size())
                    break;
            }
        }
        return result;
    }
};

void expect_define(const SExpr &doc, const string &kind) {
    if (!doc.head_is("define") || doc.items.size() < 2 || !doc.items[1].head_is(kind) ||
        doc.items[1].items.size() != 2)
        fail(doc, "expected (define (" + kind + " <name>) ...)");
}

void read_domain(const SExpr &doc, Grounder &g) {
    expect_define(doc, "domain");
    for (size_t i = 2; i < doc.items.size(); ++i) {
        const SExpr &section = doc.items[i];
        if (!section.is_list || section.items.empty() || !section.items.front().is_symbol())
            fail(section, "malformed domain section");
        string key = lower(section.items.front().text);
        if (key == ":requirements") {
            continue;
        } else if (key == ":types") {
            for (const TypedName &t : parse_typed_list(section, 1))
                g.type_parent[t.name] = t.types.front();
        } else if (key == ":constants") {
            for (const TypedName &c : parse_typed_list(section, 1))
                g.objects.emplace_back(c.name, c.types.front());
        } else if (key == ":predicates") {
            g.predicates_declared = true;
            for (size_t k = 1; k < section.items.size(); ++k) {
                const SExpr &pred = section.items[k];
                if (!pred.is_list || pred.items.empty() || !pred.items.front().is_symbol())
                    fail(pred, "malformed predicate declaration");
                size_t arity = parse_typed_list(pred, 1).size();
                g.predicate_arity[pred.items.front().text] = arity;
                g.predicate_order.push_back(pred.items.front().text);
            }
        } else if (key == ":functions") {
            fail(section, "unsupported construct ':functions' (numeric fluents)");
        } else if (key == ":derived") {
            fail(section, "unsupported construct ':derived' (derived predicates)");
        } else if (key == ":action") {
            if (section.items.size() < 2 || !section.items[1].is_symbol())
                fail(section, "action name expected");
            Schema schema;
            schema.name = section.items[1].text;
            schema.where = section;
            for (size_t k = 2; k + 1 < section.items.size(); k += 2) {
                const SExpr &tag = section.items[k];
                const SExpr &value = section.items[k + 1];
                string t = tag.is_symbol() ? lower(tag.text) : "";
                if (t == ":parameters")
                    schema.parameters = parse_typed_list(value, 0);
                else if (t == ":precondition")
                    schema.precondition = &value;
                else if (t == ":effect")
                    schema.effect = &value;
                else
                    fail(tag, "unexpected action field");
            }
            if ((section.items.size() - 2) % 2 != 0)
                fail(section, "odd number of action fields");
            g.schemas.push_back(move(schema));
        } else {
            fail(section, "unsupported domain section '" + key + "'");
        }
    }
}

struct ProblemPart {
    vector<string> init;
    const SExpr *goal = nullptr;
};

ProblemPart read_problem(const SExpr &doc, Grounder &g) {
    expect_define(doc, "problem");
    ProblemPart part;
    for (size_t i = 2; i < doc.items.size(); ++i) {
        const SExpr &section = doc.items[i];
        if (!section.is_list || section.items.empty() || !section.items.front().is_symbol())
            fail(section, "malformed problem section");
        string key = lower(section.items.front().text);
        if (key == ":domain" || key == ":requirements") {
            continue;
        } else if (key == ":objects") {
            for (const TypedName &o : parse_typed_list(section, 1))
                g.objects.emplace_back(o.name, o.types.front());
        } else if (key == ":init") {
            for (size_t k = 1; k < section.items.size(); ++k) {
                const SExpr &fact = section.items[k];
                if (fact.head_is("=") || fact.head_is("not"))
                    fail(fact, "unsupported construct in :init");
                string atom = g.ground_atom(fact, {});
                g.note_atom(atom);
                part.init.push_back(atom);
            }
        } else if (key == ":goal") {
            if (section.items.size() != 2)
                fail(section, ":goal takes one formula");
            part.goal = &section.items[1];
        } else if (key == ":metric") {
            fail(section, "unsupported construct ':metric' (numeric fluents)");
        } else {
            fail(section, "unsupported problem section '" + key + "'");
        }
    }
    if (!part.goal)
        fail(doc, "problem has no :goal");
    return part;
}

void collect_goal_literals(const SExpr &expr, vector<pair<const SExpr *, bool>> &out) {
    if (expr.head_is("and")) {
        for (size_t i = 1; i < expr.items.size(); ++i)
            collect_goal_literals(expr.items[i], out);
    } else if (expr.head_is("not")) {
        if (expr.items.size() != 2 || expr.items[1].head_is("and") || expr.items[1].head_is("or") ||
            expr.items[1].head_is("not"))
            fail(expr, "goals must be conjunctions of literals");
        out.emplace_back(&expr.items[1], false);
    } else if (expr.head_is("or") || expr.head_is("imply") || expr.head_is("forall") || expr.head_is("exists")) {
        fail(expr, "goals must be conjunctions of literals");
    } else {
        out.emplace_back(&expr, true);
    }
}

struct VariableMap {
    // atom -> (variable, value index when true); binary atoms map to value 1.
    map<string, Fact> positive;
    set<string> grouped;
};

Formula to_formula(const GroundFormula &gf, const VariableMap &vars) {
    switch (gf.kind) {
    case GroundFormula::Kind::atom:
        return Formula::make_atom(vars.positive.at(gf.atom));
    case GroundFormula::Kind::negation:
        return Formula::make_not(to_formula(gf.children.front(), vars));
    default: {
        vector<Formula> children;
        for (const GroundFormula &child : gf.children)
            children.push_back(to_formula(child, vars));
        return gf.kind == GroundFormula::Kind::conjunction ? Formula::make_and(move(children))
                                                           : Formula::make_or(move(children));
    }
    }
}

string owner_of(const string &name) {
    size_t dot = name.find('.');
    return dot == string::npos ? "" : name.substr(0, dot);
}
} // namespace

string pddl_action_name(const string &name) {
    string out;
    for (char c : name)
        out += (isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.') ? c : '_';
    return out;
}

PlanningTask parse_pddl(const string &domain_text, const string &problem_text) {
    SExpr domain = Reader(domain_text).read_document();
    SExpr problem = Reader(problem_text).read_document();
    Grounder g;
    read_domain(domain, g);
    for (const string &pred : g.predicate_order)
        if (g.predicate_arity[pred] == 0) {
            g.note_atom(pred);
            g.nullary_atoms.insert(pred);
        }
    ProblemPart part = read_problem(problem, g);
    vector<GroundAction> ground = g.ground_all();

    vector<pair<const SExpr *, bool>> goal_literals;
    collect_goal_literals(*part.goal, goal_literals);
    vector<pair<string, bool>> goal_atoms;
    for (const auto &[expr, positive] : goal_literals) {
        string atom = g.ground_atom(*expr, {});
        g.note_atom(atom);
        goal_atoms.emplace_back(atom, positive);
    }
    set<string> init(part.init.begin(), part.init.end());

    // Candidate finite-domain families "<var>:<value>" among 0-ary atoms.
    map<string, vector<string>> families;
    vector<string> family_order;
    for (const string &atom : g.atom_order) {
        size_t colon = atom.rfind(':');
        if (colon == string::npos || colon == 0 || colon + 1 == atom.size() || !g.nullary_atoms.count(atom))
            continue;
        string var = atom.substr(0, colon);
        if (!families.count(var))
            family_order.push_back(var);
        families[var].push_back(atom);
    }

    auto family_ok = [&](const vector<string> &members) {
        set<string> member_set(members.begin(), members.end());
        int initially_true = 0;
        for (const string &m : members)
            initially_true += init.count(m);
        if (initially_true != 1)
            return false;
        for (const GroundAction &action : ground) {
            for (const GroundOutcome &outcome : action.outcomes) {
                vector<string> added;
                for (const string &a : outcome.adds)
                    if (member_set.count(a))
                        added.push_back(a);
                bool deletes_any = any_of(outcome.dels.begin(), outcome.dels.end(),
                                          [&](const string &d) { return member_set.count(d) > 0; });
                if (added.empty() && deletes_any)
                    return false;
                if (added.size() > 1)
                    return false;
                if (added.size() == 1) {
                    for (const string &m : members)
                        if (m != added.front() && !outcome.dels.count(m))
                            return false;
                }
            }
        }
        for (const auto &[atom, positive] : goal_atoms)
            if (!positive && member_set.count(atom))
                return false;
        return true;
    };

    VariableMap vars;
    vector<Variable> variables;
    vector<Value> initial;
    set<string> emitted;
    for (const string &atom : g.atom_order) {
        if (emitted.count(atom))
            continue;
        size_t colon = atom.rfind(':');
        if (colon != string::npos) {
            string name = atom.substr(0, colon);
            auto fam = families.find(name);
            if (fam != families.end() && family_ok(fam->second)) {
                Variable var;
                var.name = name;
                var.owner = owner_of(name);
                Value init_value = 0;
                for (const string &member : fam->second) {
                    Value value = static_cast<Value>(var.domain.size());
                    var.domain.push_back(member.substr(member.rfind(':') + 1));
                    vars.positive[member] = Fact{static_cast<VarId>(variables.size()), value};
                    vars.grouped.insert(member);
                    if (init.count(member))
                        init_value = value;
                    emitted.insert(member);
                }
                variables.push_back(move(var));
                initial.push_back(init_value);
                continue;
            }
        }
        Variable var;
        var.name = atom;
        var.owner = owner_of(atom);
        var.domain = {"false", "true"};
        vars.positive[atom] = Fact{static_cast<VarId>(variables.size()), 1};
        variables.push_back(move(var));
        initial.push_back(init.count(atom) ? 1 : 0);
        emitted.insert(atom);
    }

    vector<Action> actions;
    set<string> names;
    for (const GroundAction &ga : ground) {
        Action action;
        action.name = ga.name;
        if (!names.insert(action.name).second)
            throw PddlError(1, 1, "duplicate action '" + action.name + "'");
        action.precondition = to_formula(ga.precondition, vars);
        for (const GroundOutcome &go : ga.outcomes) {
            map<VarId, Value> assignment;
            for (const string &d : go.dels) {
                if (vars.grouped.count(d))
                    continue;
                Fact f = vars.positive.at(d);
                assignment[f.var] = 0;
            }
            for (const string &a : go.adds)
                assignment[vars.positive.at(a).var] = vars.positive.at(a).value;
            PartialAssignment outcome;
            for (const auto &[var, value] : assignment)
                outcome.push_back(Fact{var, value});
            if (find(action.outcomes.begin(), action.outcomes.end(), outcome) == action.outcomes.end())
                action.outcomes.push_back(move(outcome));
        }
        set<string> owners;
        for (VarId v : formula_variables(action.precondition))
            owners.insert(variables[static_cast<size_t>(v)].owner);
        for (const PartialAssignment &outcome : action.outcomes)
            for (const Fact &f : outcome)
                owners.insert(variables[static_cast<size_t>(f.var)].owner);
        action.owner = owners.size() == 1 ? *owners.begin() : "";
        actions.push_back(move(action));
    }

    vector<Fact> goal;
    for (const auto &[atom, positive] : goal_atoms) {
        Fact f = vars.positive.at(atom);
        if (!positive)
            f.value = 0;
        goal.push_back(f);
    }
    PartialAssignment goal_assignment;
    try {
        goal_assignment = make_assignment(goal);
    } catch (const ModelError &) {
        fail(*part.goal, "goal is contradictory");
    }
    return PlanningTask(move(variables), move(actions), State(move(initial)), move(goal_assignment));
}

namespace {
string atom_text(const PlanningTask &task, const Fact &fact) {
    const Variable &var = task.variable(fact.var);
    return "(" + var.name + ":" + var.domain[fact.value] + ")";
}

void print_formula(const PlanningTask &task, const Formula &formula, ostream &out) {
    switch (formula.kind()) {
    case Formula::Kind::atom:
        out << atom_text(task, formula.atom());
        return;
    case Formula::Kind::negation:
        out << "(not ";
        print_formula(task, formula.children().front(), out);
        out << ")";
        return;
    default:
        out << (formula.kind() == Formula::Kind::conjunction ? "(and" : "(or");
        for (const Formula &child : formula.children()) {
            out << " ";
            print_formula(task, child, out);
        }
        out << ")";
    }
}

void print_outcome(const PlanningTask &task, const PartialAssignment &outcome, ostream &out) {
    out << "(and";
    for (const Fact &fact : outcome) {
        out << " " << atom_text(task, fact);
        for (int c = 0; c < task.variable(fact.var).domain_size(); ++c)
            if (c != fact.value)
                out << " (not " << atom_text(task, Fact{fact.var, static_cast<Value>(c)}) << ")";
    }
    out << ")";
}
} // namespace

PddlFiles print_pddl(const PlanningTask &task) {
    ostringstream domain;
    domain << "(define (domain sam)\n"
           << "  (:requirements :strips :negative-preconditions :disjunctive-preconditions :non-deterministic)\n"
           << "  (:predicates\n";
    for (VarId v = 0; v < task.num_variables(); ++v)
        for (int c = 0; c < task.variable(v).domain_size(); ++c)
            domain << "    " << atom_text(task, Fact{v, static_cast<Value>(c)}) << "\n";
    domain << "  )\n";
    for (const Action &action : task.actions()) {
        domain << "  (:action " << pddl_action_name(action.name) << "\n"
               << "    :parameters ()\n    :precondition ";
        print_formula(task, action.precondition, domain);
        domain << "\n    :effect ";
        if (action.deterministic()) {
            print_outcome(task, action.outcomes.front(), domain);
        } else {
            domain << "(oneof";
            for (const PartialAssignment &outcome : action.outcomes) {
                domain << "\n      ";
                print_outcome(task, outcome, domain);
            }
            domain << ")";
        }
        domain << ")\n";
    }
    domain << ")\n";

    ostringstream problem;
    problem << "(define (problem sam-problem)\n  (:domain sam)\n  (:init";
    for (VarId v = 0; v < task.num_variables(); ++v)
        problem << "\n    " << atom_text(task, Fact{v, task.initial()[v]});
    problem << ")\n  (:goal (and";
    for (const Fact &fact : task.goal())
        problem << " " << atom_text(task, fact);
    problem << "))\n)\n";
    return PddlFiles{domain.str(), problem.str()};
}

} // namespace sam
