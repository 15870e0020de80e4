#ifndef SAM_SERVICE_H
#define SAM_SERVICE_H

#include "sam/process.h"
#include "sam/search.h"
#include "sam/task_io.h"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace sam {

class UnknownObjectError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Business objects loaded once from a directory of native-format files.
class ModelRepository {
public:
    ModelRepository() = default;
    explicit ModelRepository(std::vector<BusinessObject> objects);

    static ModelRepository load(const std::filesystem::path &directory);

    const std::vector<BusinessObject> &objects() const { return objects_; }
    // Throws UnknownObjectError.
    const BusinessObject &find(const std::string &id) const;

private:
    std::vector<BusinessObject> objects_;
    std::map<std::string, std::size_t> index_;
};

nlohmann::json object_summary(const BusinessObject &object);
nlohmann::json object_details(const BusinessObject &object);

struct PlanRequest {
    ProblemBundle bundle;
    SearchConfig config;
    ProcessFormat format = ProcessFormat::json;
};

/*
  Request body fields: "object" (id or list of ids) or "objects" (inline
  native objects), "init_overrides", "goal", "scope", "mode", "heuristic",
  "weight", "helpful", "max_evals", "timeout", "strong_timeout", "format".
  Throws SchemaError, UnknownObjectError.
*/
PlanRequest plan_request_from_json(const nlohmann::json &doc, const ModelRepository &repository);
nlohmann::json plan_request_to_json(const PlanRequest &request);

// {verdict, mode, strong_phase?, goal, plan, process, rendered?, statistics}
nlohmann::json plan_response(const PlanningTask &task, const SearchResult &result, ProcessFormat format);
nlohmann::json statistics_to_json(const SearchStatistics &stats);

// Compiles and solves. Throws ModelError on semantic errors.
nlohmann::json run_plan_request(const PlanRequest &request);

FailCertifier certifier_from_string(const std::string &name, const PlanningTask &task);

// Body: the problem fields of a plan request plus "plan", "mode" and
// optionally "certifier" (rpg, search, oracle).
nlohmann::json run_validate_request(const nlohmann::json &doc, const ModelRepository &repository);

struct ServiceOptions {
    // Upper limits applied to every request.
    double strong_phase_budget = 0.5;
    double time_budget = 60.0;
    std::string cors_origin = "*";
};

class PlanningService {
public:
    PlanningService(ModelRepository repository, ServiceOptions options = {});
    ~PlanningService();

    httplib::Server &server() { return *server_; }
    // Blocks until stop().
    bool listen(const std::string &host, int port);
    // Binds to a free port and returns it; serve with listen_after_bind().
    int bind_any_port(const std::string &host);
    bool listen_after_bind();
    void stop();

private:
    void routes();

    ModelRepository repository_;
    ServiceOptions options_;
    std::unique_ptr<httplib::Server> server_;
};

} // namespace sam

#endif
