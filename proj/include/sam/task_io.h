#ifndef SAM_TASK_IO_H
#define SAM_TASK_IO_H

#include "sam/model.h"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sam {

// Input file that does not match the native schema; the message starts with
// the JSON path of the offending field.
class SchemaError : public std::runtime_error {
public:
    SchemaError(const std::string &path, const std::string &message)
        : std::runtime_error(path + ": " + message), path_(path) {}
    const std::string &path() const { return path_; }

private:
    std::string path_;
};

/*
  A business object's status model. Variables are local to the object;
  formulas and effects refer to them by their index in `variables`.
*/
struct BusinessObject {
    struct StatusAction {
        std::string name;
        Formula precondition;
        // Negation-free DNF; one disjunct per possible outcome.
        std::vector<PartialAssignment> effect;
    };

    std::string id;
    std::string name;
    std::vector<Variable> variables;
    std::vector<Value> initial;
    std::vector<StatusAction> actions;

    std::string qualified_name(VarId var) const;
};

enum class ActionScope { full, bo_relevant };

// A reference to a variable by qualified name ("CQ.archiving").
struct NamedAtom {
    std::string var;
    std::string value;
    // Initial-state overrides only: leave the variable unspecified.
    bool unset = false;

    friend bool operator==(const NamedAtom &, const NamedAtom &) = default;
};

struct ProblemBundle {
    std::vector<BusinessObject> objects;
    std::vector<NamedAtom> init_overrides;
    std::vector<NamedAtom> goal;
    ActionScope scope = ActionScope::full;
};

// Reserved value given to variables left unspecified in the initial state.
inline const std::string unset_value = "__unset__";

PlanningTask compile_bo(const std::vector<BusinessObject> &objects,
                        const std::vector<NamedAtom> &goal,
                        const std::vector<NamedAtom> &overrides, ActionScope scope,
                        std::vector<std::string> *warnings = nullptr);
PlanningTask compile_bo(const ProblemBundle &bundle, std::vector<std::string> *warnings = nullptr);

// Native JSON format.
std::vector<BusinessObject> objects_from_json(const nlohmann::json &doc);
nlohmann::json objects_to_json(const std::vector<BusinessObject> &objects);
// Reads "goal", "init_overrides" and "scope" into `bundle`; the objects are
// left untouched.
void problem_from_json(const nlohmann::json &doc, ProblemBundle &bundle);
nlohmann::json problem_to_json(const ProblemBundle &bundle);
// A document carrying both objects and problem fields.
ProblemBundle bundle_from_json(const nlohmann::json &doc);

NamedAtom atom_from_json(const nlohmann::json &doc, const std::string &path);
nlohmann::json atom_to_json(const NamedAtom &atom);
std::string to_string(ActionScope scope);

// Splits a task back into business objects, grouped by variable owner.
// Throws ModelError for tasks that cannot be expressed in the native format.
ProblemBundle task_to_bundle(const PlanningTask &task);

nlohmann::json task_to_json(const PlanningTask &task);
PlanningTask task_from_json(const nlohmann::json &doc);
void write_task(const PlanningTask &task, const std::filesystem::path &path);
PlanningTask read_task(const std::filesystem::path &path);

nlohmann::json read_json_file(const std::filesystem::path &path);

nlohmann::json plan_to_json(const PlanningTask &task, const ActionTree &tree);
ActionTree plan_from_json(const PlanningTask &task, const nlohmann::json &doc);

} // namespace sam

#endif
