#include "sam/service.h"

#include "sam/experiments.h"

#include <httplib.h>

#include <algorithm>
#include <set>

using namespace std;
using json = nlohmann::json;

namespace sam {

ModelRepository::ModelRepository(vector<BusinessObject> objects) : objects_(move(objects)) {
    for (size_t i = 0; i < objects_.size(); ++i) {
        if (!index_.emplace(objects_[i].id, i).second)
            throw ModelError("duplicate business object id '" + objects_[i].id + "'");
    }
}

ModelRepository ModelRepository::load(const filesystem::path &directory) {
    if (!filesystem::is_directory(directory))
        throw runtime_error("not a directory: " + directory.string());
    vector<filesystem::path> files;
    for (const auto &entry : filesystem::directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    }
    ranges::sort(files);
    vector<BusinessObject> objects;
    for (const filesystem::path &file : files) {
        json doc = read_json_file(file);
        // Task files in the same directory carry a goal; only object lists are loaded.
        if (!doc.is_object() || !doc.contains("objects") || doc.contains("goal"))
            continue;
        for (BusinessObject &object : objects_from_json(doc))
            objects.push_back(move(object));
    }
    return ModelRepository(move(objects));
}

const BusinessObject &ModelRepository::find(const string &id) const {
    auto it = index_.find(id);
    if (it == index_.end())
        throw UnknownObjectError("unknown business object '" + id + "'");
    return objects_[it->second];
}

json object_summary(const BusinessObject &object) {
    json variables = json::array();
    for (size_t v = 0; v < object.variables.size(); ++v) {
        const Variable &var = object.variables[v];
        variables.push_back({{"name", object.qualified_name(static_cast<VarId>(v))},
                             {"domain", var.domain},
                             {"initial", var.domain[static_cast<size_t>(object.initial[v])]}});
    }
    return json{{"id", object.id}, {"name", object.name}, {"variables", variables}};
}

json object_details(const BusinessObject &object) {
    json doc = object_summary(object);
    json actions = json::array();
    for (const auto &action : object.actions)
        actions.push_back({{"name", action.name}, {"outcomes", action.effect.size()}});
    doc["actions"] = actions;
    return doc;
}

namespace {
const json *optional_field(const json &doc, const char *key) {
    auto it = doc.find(key);
    return it == doc.end() || it->is_null() ? nullptr : &*it;
}

string string_field(const json &doc, const char *key, const string &fallback) {
    const json *value = optional_field(doc, key);
    if (!value)
        return fallback;
    if (!value->is_string())
        throw SchemaError(string("$.") + key, "expected a string");
    return value->get<string>();
}

double number_field(const json &doc, const char *key, double fallback) {
    const json *value = optional_field(doc, key);
    if (!value)
        return fallback;
    if (!value->is_number())
        throw SchemaError(string("$.") + key, "expected a number");
    return value->get<double>();
}

template <typename T, typename F>
T parse_enum(const json &doc, const char *key, const string &fallback, F parse) {
    string name = string_field(doc, key, fallback);
    try {
        return parse(name);
    } catch (const invalid_argument &e) {
        throw SchemaError(string("$.") + key, e.what());
    }
}

const set<string> request_fields = {"object",  "objects",   "init_overrides", "goal",    "scope",
                                    "mode",    "heuristic", "weight",         "helpful", "max_evals",
                                    "timeout", "strong_timeout", "format", "plan", "certifier"};

ProblemBundle request_bundle(const json &doc, const ModelRepository &repository) {
    if (!doc.is_object())
        throw SchemaError("$", "expected an object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!request_fields.contains(it.key()))
            throw SchemaError("$." + it.key(), "unknown field");
    }
    ProblemBundle bundle;
    bool has_object = doc.contains("object"), has_inline = doc.contains("objects");
    if (has_object == has_inline)
        throw SchemaError("$", "exactly one of \"object\" and \"objects\" is required");
    if (has_inline) {
        bundle.objects = objects_from_json(json{{"objects", doc.at("objects")}});
    } else {
        const json &ref = doc.at("object");
        if (ref.is_string()) {
            bundle.objects.push_back(repository.find(ref.get<string>()));
        } else if (ref.is_array()) {
            for (size_t i = 0; i < ref.size(); ++i) {
                if (!ref[i].is_string())
                    throw SchemaError("$.object[" + std::to_string(i) + "]", "expected a string");
                bundle.objects.push_back(repository.find(ref[i].get<string>()));
            }
        } else {
            throw SchemaError("$.object", "expected a string or an array of strings");
        }
    }
    json problem = json::object();
    for (const char *key : {"goal", "init_overrides", "scope"}) {
        if (doc.contains(key))
            problem[key] = doc.at(key);
    }
    problem_from_json(problem, bundle);
    return bundle;
}
} // namespace

PlanRequest plan_request_from_json(const json &doc, const ModelRepository &repository) {
    PlanRequest request;
    request.bundle = request_bundle(doc, repository);
    if (doc.contains("plan") || doc.contains("certifier"))
        throw SchemaError("$", "\"plan\" and \"certifier\" belong to validate requests");
    SearchConfig &config = request.config;
    config.mode = parse_enum<Mode>(doc, "mode", "auto", mode_from_string);
    config.heuristic = parse_enum<HeuristicKind>(doc, "heuristic", "ff", heuristic_from_string);
    config.weight = number_field(doc, "weight", config.weight);
    if (const json *helpful = optional_field(doc, "helpful")) {
        if (!helpful->is_boolean())
            throw SchemaError("$.helpful", "expected a boolean");
        config.helpful_pruning = helpful->get<bool>();
    }
    config.max_evaluations = static_cast<long>(number_field(doc, "max_evals", 0));
    config.time_budget = number_field(doc, "timeout", config.time_budget);
    config.strong_phase_budget = number_field(doc, "strong_timeout", config.strong_phase_budget);
    if (!(config.weight >= 1.0))
        throw SchemaError("$.weight", "must be at least 1");
    if (config.max_evaluations < 0 || config.time_budget < 0 || config.strong_phase_budget < 0)
        throw SchemaError("$", "budgets must not be negative");
    request.format = parse_enum<ProcessFormat>(doc, "format", "json", process_format_from_string);
    return request;
}

json plan_request_to_json(const PlanRequest &request) {
    json doc = problem_to_json(request.bundle);
    doc["objects"] = objects_to_json(request.bundle.objects).at("objects");
    const SearchConfig &config = request.config;
    doc["mode"] = to_string(config.mode);
    doc["heuristic"] = to_string(config.heuristic);
    doc["weight"] = config.weight;
    doc["helpful"] = config.helpful_pruning;
    doc["max_evals"] = config.max_evaluations;
    doc["timeout"] = config.time_budget;
    doc["strong_timeout"] = config.strong_phase_budget;
    doc["format"] = request.format == ProcessFormat::json ? "json"
                    : request.format == ProcessFormat::dot ? "dot"
                                                           : "bpmn";
    return doc;
}

json statistics_to_json(const SearchStatistics &stats) {
    return json{{"evaluations", stats.evaluations},
                {"expansions", stats.expansions},
                {"generated", stats.generated},
                {"max_depth", stats.max_depth},
                {"wall_time", stats.wall_time},
                {"failed_leaves", stats.failed_leaves},
                {"pruned", stats.pruned},
                {"reran_without_pruning", stats.reran_without_pruning}};
}

json plan_response(const PlanningTask &task, const SearchResult &result, ProcessFormat format) {
    json goal = json::array();
    for (const Fact &fact : task.goal())
        goal.push_back({{"var", task.variable(fact.var).name},
                        {"val", task.variable(fact.var).domain[static_cast<size_t>(fact.value)]}});
    json doc{{"verdict", to_string(result.verdict)},
             {"goal", goal},
             {"plan", nullptr},
             {"process", nullptr},
             {"statistics", statistics_to_json(result.stats)}};
    if (result.strong_phase) {
        doc["strong_phase"] = to_string(*result.strong_phase);
        doc["strong_statistics"] = statistics_to_json(result.strong_stats);
    }
    if (result.tree) {
        doc["mode"] = to_string(result.plan_mode);
        doc["plan"] = plan_to_json(task, *result.tree);
        ProcessGraph graph = plan_to_process(task, *result.tree);
        doc["process"] = process_to_json(graph);
        if (format != ProcessFormat::json)
            doc["rendered"] = emit(graph, format);
    }
    return doc;
}

json run_plan_request(const PlanRequest &request) {
    PlanningTask task = compile_bo(request.bundle);
    SearchResult result = solve(task, request.config);
    return plan_response(task, result, request.format);
}

FailCertifier certifier_from_string(const string &name, const PlanningTask &task) {
    if (name == "rpg")
        return rpg_certifier(task);
    if (name == "search")
        return search_certifier(task);
    if (name == "oracle")
        return oracle_certifier(task);
    throw invalid_argument("unknown certifier '" + name + "'");
}

json run_validate_request(const json &doc, const ModelRepository &repository) {
    ProblemBundle bundle = request_bundle(doc, repository);
    if (!doc.contains("plan"))
        throw SchemaError("$.plan", "missing field");
    Mode mode = parse_enum<Mode>(doc, "mode", "weak", mode_from_string);
    if (mode == Mode::auto_)
        throw SchemaError("$.mode", "expected \"strong\" or \"weak\"");
    string certifier_name = string_field(doc, "certifier", "rpg");
    PlanningTask task = compile_bo(bundle);
    FailCertifier certifier;
    try {
        certifier = certifier_from_string(certifier_name, task);
    } catch (const invalid_argument &e) {
        throw SchemaError("$.certifier", e.what());
    }
    ActionTree tree = plan_from_json(task, doc.at("plan"));
    ValidationReport report = validate_plan(task, tree, mode, certifier);
    return json{{"valid", report.valid}, {"message", report.message}, {"path", report.path}};
}

PlanningService::PlanningService(ModelRepository repository, ServiceOptions options)
    : repository_(move(repository)), options_(move(options)), server_(make_unique<httplib::Server>()) {
    routes();
}

PlanningService::~PlanningService() = default;

namespace {
void send_json(httplib::Response &res, int status, const json &body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response &res, int status, const string &message) {
    send_json(res, status, json{{"error", message}});
}

template <typename F>
void guarded(httplib::Response &res, F body) {
    try {
        body();
    } catch (const json::parse_error &e) {
        send_error(res, 400, string("malformed JSON: ") + e.what());
    } catch (const SchemaError &e) {
        send_error(res, 400, e.what());
    } catch (const UnknownObjectError &e) {
        send_error(res, 404, e.what());
    } catch (const ModelError &e) {
        send_error(res, 422, e.what());
    } catch (const exception &e) {
        send_error(res, 500, e.what());
    }
}
} // namespace

void PlanningService::routes() {
    httplib::Server &srv = *server_;
    srv.set_default_headers({{"Access-Control-Allow-Origin", options_.cors_origin},
                             {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                             {"Access-Control-Allow-Headers", "Content-Type"}});
    srv.Options(".*", [](const httplib::Request &, httplib::Response &res) { res.status = 204; });

    srv.Get("/objects", [this](const httplib::Request &, httplib::Response &res) {
        json items = json::array();
        for (const BusinessObject &object : repository_.objects())
            items.push_back(object_summary(object));
        send_json(res, 200, json{{"objects", items}});
    });

    srv.Get(R"(/objects/([^/]+))", [this](const httplib::Request &req, httplib::Response &res) {
        guarded(res, [&] { send_json(res, 200, object_details(repository_.find(req.matches[1]))); });
    });

    srv.Post("/plan", [this](const httplib::Request &req, httplib::Response &res) {
        guarded(res, [&] {
            PlanRequest request = plan_request_from_json(json::parse(req.body), repository_);
            request.config.time_budget = min(request.config.time_budget, options_.time_budget);
            request.config.strong_phase_budget =
                min(request.config.strong_phase_budget, options_.strong_phase_budget);
            send_json(res, 200, run_plan_request(request));
        });
    });

    srv.Post("/validate", [this](const httplib::Request &req, httplib::Response &res) {
        guarded(res, [&] { send_json(res, 200, run_validate_request(json::parse(req.body), repository_)); });
    });
}

bool PlanningService::listen(const string &host, int port) { return server_->listen(host, port); }

int PlanningService::bind_any_port(const string &host) { return server_->bind_to_any_port(host); }

bool PlanningService::listen_after_bind() { return server_->listen_after_bind(); }

void PlanningService::stop() { server_->stop(); }

} // namespace sam
