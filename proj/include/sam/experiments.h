#ifndef SAM_EXPERIMENTS_H
#define SAM_EXPERIMENTS_H

#include "sam/search.h"
#include "sam/task_io.h"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace sam {

struct GeneratorSpec {
    // Empty means every object.
    std::vector<std::string> objects;
    int goal_size = 1;
    // 0 means all value tuples.
    int samples = 5;
    std::uint64_t seed = 1;
    ActionScope scope = ActionScope::bo_relevant;
};

struct GeneratedInstance {
    std::string id;
    std::string object;
    int goal_size = 0;
    ProblemBundle bundle;
};

/*
  For each goal_size-subset of an object's variables (lexicographic by
  variable index), emits `samples` value tuples drawn uniformly without
  replacement, or all tuples when there are fewer. Tuples keep lexicographic
  order. Deterministic under the seed.
*/
std::vector<GeneratedInstance> generate(const std::vector<BusinessObject> &objects, const GeneratorSpec &spec);

class OracleBoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exhaustive strong/weak solvability of a search state, memoized on
// (state, availability). Throws OracleBoundError past `bound` visited states.
bool oracle_solvable(const PlanningTask &task, const SearchState &ss, Mode mode, std::size_t bound = 1000000);

FailCertifier oracle_certifier(const PlanningTask &task, std::size_t bound = 1000000);

struct RandomTaskParams {
    int max_variables = 6;
    int max_domain = 3;
    int max_actions = 7;
    int max_outcomes = 3;
    double nondet_probability = 0.5;
    int max_goal = 3;
};

PlanningTask random_task(std::mt19937_64 &rng, const RandomTaskParams &params = {});

struct SuiteInstance {
    std::string id;
    std::string object;
    int goal_size = 0;
    PlanningTask task;
};

struct NamedConfig {
    std::string name;
    SearchConfig config;
};

struct RunRecord {
    std::string instance;
    std::string object;
    int goal_size = 0;
    std::string config;
    Mode mode = Mode::weak;
    Verdict verdict = Verdict::resource_limit;
    long evaluations = 0;
    double wall_time = 0.0;
    int plan_size = 0;
    int failed_leaves = 0;
    double nondet_fraction = 0.0;
    std::string strong_phase;
    std::string error;
};

struct SuiteResult {
    std::vector<RunRecord> records;
    nlohmann::json aggregates;
};

std::vector<SuiteInstance> compile_instances(const std::vector<GeneratedInstance> &generated);

// Runs every instance under every config on `threads` workers. Exceptions are
// recorded per run.
SuiteResult run_suite(const std::vector<SuiteInstance> &instances, const std::vector<NamedConfig> &configs,
                      unsigned threads = 0);

nlohmann::json aggregate(const std::vector<RunRecord> &records);

extern const char *const csv_header;
void write_csv(std::ostream &out, const std::vector<RunRecord> &records);

// Fraction of nondeterministic action nodes in a plan.
double nondet_fraction(const PlanningTask &task, const ActionTree &tree);

// Copy of an object under a new id.
BusinessObject rename_object(const BusinessObject &object, const std::string &id);

// COM_k: the first k objects with their goals conjoined.
ProblemBundle combine_goals(const std::vector<BusinessObject> &objects,
                            const std::vector<std::vector<NamedAtom>> &goals, std::size_t k);

// Restricts a plan to the actions owned by one object by replaying it and
// dropping other objects' steps; the result is checked with validate_plan.
std::optional<ActionTree> project_plan(const PlanningTask &task, const ActionTree &tree,
                                       const std::string &owner, const PlanningTask &target);

// Pairs of (domain, problem) PDDL files below a directory. A problem file
// "p.pddl" pairs with "domain.pddl" in its directory or "p-domain.pddl".
std::vector<std::pair<std::filesystem::path, std::filesystem::path>>
find_pddl_pairs(const std::filesystem::path &root);

std::string read_text_file(const std::filesystem::path &path);

} // namespace sam

#endif
