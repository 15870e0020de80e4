#include "support.h"

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace sam;
using namespace sam::testing;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch() {
    fs::path dir = fs::temp_directory_path() / "samplan_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path &path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run samplan(const std::string &args) {
    fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
    std::string cmd = std::string("\"") + SAM_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                      err.string() + "\"";
    int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string q(const std::string &path) { return "\"" + path + "\""; }

} // namespace

TEST_CASE("solve") {
    Run r = samplan("solve " + q(data_path("cq_task.json")));
    CHECK(r.code == 0);
    CHECK(r.err.find("strong phase: unsolvable, no strong plan found") != std::string::npos);
    json body = json::parse(r.out);
    CHECK(body["verdict"] == "plan");
    CHECK(body["mode"] == "weak");
    CHECK(body["plan"] == read_json_file(data_path("cq_weak_plan.json")));

    Run split = samplan("solve " + q(data_path("cq.json")) + " " + q(data_path("cq_problem.json")));
    CHECK(split.code == 0);
    CHECK(json::parse(split.out)["plan"] == body["plan"]);

    Run pddl = samplan("solve " + q(data_path("cq_domain.pddl")) + " " + q(data_path("cq_problem.pddl")) +
                       " --mode weak");
    CHECK(pddl.code == 0);
    CHECK(json::parse(pddl.out)["statistics"]["failed_leaves"] == 3);

    Run strong = samplan("solve " + q(data_path("cq_task.json")) + " --mode strong --no-helpful");
    CHECK(strong.code == 1);
    CHECK(json::parse(strong.out)["verdict"] == "unsolvable");

    Run limited = samplan("solve " + q(data_path("cq_task.json")) + " --mode weak --max-evals 2");
    CHECK(limited.code == 2);

    Run dot = samplan("solve " + q(data_path("cq_task.json")) + " --out dot");
    CHECK(dot.code == 0);
    CHECK(dot.out.starts_with("digraph"));

    Run bpmn = samplan("solve " + q(data_path("cq_task.json")) + " --out bpmn");
    CHECK(bpmn.out.find("<definitions") != std::string::npos);
}

TEST_CASE("input errors exit with 3") {
    CHECK(samplan("solve " + q(data_path("missing.json"))).code == 3);
    fs::path bad = scratch() / "bad.json";
    std::ofstream(bad) << R"({"objects": [], "goal": [], "extra": 1})";
    Run r = samplan("solve " + q(bad.string()));
    CHECK(r.code == 3);
    CHECK(r.err.find("$.extra") != std::string::npos);

    std::ofstream(bad) << R"({"objects": [], "goal": [{"var": "X.y", "val": "z"}]})";
    CHECK(samplan("solve " + q(bad.string())).code == 3);
    CHECK(samplan("solve " + q(data_path("cq_task.json")) + " --mode sometimes").code == 3);
    CHECK(samplan("solve " + q(data_path("cq_task.json")) + " --weight 0.5").code == 3);
    CHECK(samplan("frobnicate").code == 3);
    CHECK(samplan("--help").code == 0);
}

TEST_CASE("validate") {
    std::string plan = q(data_path("cq_weak_plan.json"));
    CHECK(samplan("validate " + q(data_path("cq_task.json")) + " --plan " + plan).code == 0);
    Run strong = samplan("validate " + q(data_path("cq_task.json")) + " --plan " + plan + " --mode strong");
    CHECK(strong.code == 1);
    CHECK(samplan("validate " + q(data_path("cq_task.json")) + " --plan " + plan + " --certifier oracle").code == 0);
}

TEST_CASE("compile round-trips through pddl") {
    fs::path dir = scratch() / "pddl";
    fs::remove_all(dir);
    Run r = samplan("compile " + q(data_path("cq_task.json")) + " --pddl " + q(dir.string()));
    REQUIRE(r.code == 0);
    CHECK(slurp(dir / "domain.pddl") == slurp(data_path("cq_domain.pddl")));
    CHECK(slurp(dir / "problem.pddl") == slurp(data_path("cq_problem.pddl")));

    fs::path task = scratch() / "task.json";
    CHECK(samplan("compile " + q(data_path("cq.json")) + " " + q(data_path("cq_problem.json")) + " -o " +
                  q(task.string()))
              .code == 0);
    CHECK(read_task(task) == cq_task());
}

TEST_CASE("gen and bench") {
    fs::path dir = scratch() / "gen";
    fs::remove_all(dir);
    Run gen = samplan("gen " + q(data_path("cq.json")) + " --goal-size 1 -o " + q(dir.string()));
    REQUIRE(gen.code == 0);
    int files = 0;
    for (const auto &entry : fs::directory_iterator(dir))
        files += entry.path().extension() == ".json";
    CHECK(files == 17);

    fs::path csv = scratch() / "runs.csv";
    fs::path agg = scratch() / "agg.json";
    Run bench = samplan("bench " + q(dir.string()) + " --heuristic ff blind --mode weak --threads 2 --csv " +
                        q(csv.string()) + " --aggregate " + q(agg.string()));
    CHECK(bench.code == 0);
    json a = read_json_file(agg);
    CHECK(a["by_goal_size"]["weak-ff"]["1"]["solved"] == 17);
    CHECK(a["by_goal_size"]["weak-blind"]["1"]["solved"] == 17);
    std::string rows = slurp(csv);
    CHECK(std::count(rows.begin(), rows.end(), '\n') == 1 + 34);
}
