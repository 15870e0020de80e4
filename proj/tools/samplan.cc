#include "sam/experiments.h"
#include "sam/pddl.h"
#include "sam/process.h"
#include "sam/search.h"
#include "sam/service.h"
#include "sam/task_io.h"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

using namespace std;
using namespace sam;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum ExitCode { exit_ok = 0, exit_negative = 1, exit_limit = 2, exit_input = 3 };

struct InputError : runtime_error {
    using runtime_error::runtime_error;
};

bool is_pddl(const fs::path &path) { return path.extension() == ".pddl"; }

// One bundle file, an objects file plus a problem file, or a PDDL domain plus
// problem.
struct LoadedInput {
    optional<ProblemBundle> bundle;
    optional<PlanningTask> pddl_task;

    PlanningTask task() const { return pddl_task ? *pddl_task : compile_bo(*bundle); }
};

LoadedInput load_input(const vector<string> &files) {
    LoadedInput input;
    if (files.size() == 1 && !is_pddl(files[0])) {
        input.bundle = bundle_from_json(read_json_file(files[0]));
    } else if (files.size() == 2 && is_pddl(files[0]) && is_pddl(files[1])) {
        input.pddl_task = parse_pddl(read_text_file(files[0]), read_text_file(files[1]));
    } else if (files.size() == 2) {
        ProblemBundle bundle;
        bundle.objects = objects_from_json(read_json_file(files[0]));
        problem_from_json(read_json_file(files[1]), bundle);
        input.bundle = bundle;
    } else {
        throw InputError("expected BUNDLE.json, OBJECTS.json PROBLEM.json, or DOMAIN.pddl PROBLEM.pddl");
    }
    return input;
}

void write_output(const string &path, const string &text) {
    if (path.empty() || path == "-") {
        cout << text;
        if (!text.empty() && text.back() != '\n')
            cout << '\n';
        return;
    }
    ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path);
    out << text;
}

int verdict_exit(Verdict verdict) {
    switch (verdict) {
    case Verdict::plan:
        return exit_ok;
    case Verdict::unsolvable:
        return exit_negative;
    case Verdict::exhausted_unknown:
    case Verdict::resource_limit:
        return exit_limit;
    }
    return exit_limit;
}

Verdict verdict_from_string(const string &name) {
    for (Verdict v : {Verdict::plan, Verdict::unsolvable, Verdict::exhausted_unknown, Verdict::resource_limit}) {
        if (to_string(v) == name)
            return v;
    }
    throw logic_error("unknown verdict " + name);
}

struct SolveOptions {
    vector<string> inputs;
    string mode = "auto";
    string heuristic = "ff";
    double weight = 5.0;
    bool no_helpful = false;
    long max_evals = 0;
    double timeout = 60.0;
    double strong_timeout = 0.5;
    string out = "json";
    string output;
};

int run_solve(const SolveOptions &opt) {
    LoadedInput input = load_input(opt.inputs);
    PlanRequest request;
    SearchConfig &config = request.config;
    config.mode = mode_from_string(opt.mode);
    config.heuristic = heuristic_from_string(opt.heuristic);
    config.weight = opt.weight;
    config.helpful_pruning = !opt.no_helpful;
    config.max_evaluations = opt.max_evals;
    config.time_budget = opt.timeout;
    config.strong_phase_budget = opt.strong_timeout;
    request.format = process_format_from_string(opt.out);

    json response;
    if (input.bundle) {
        request.bundle = *input.bundle;
        response = run_plan_request(request);
    } else {
        PlanningTask task = *input.pddl_task;
        response = plan_response(task, solve(task, config), request.format);
    }

    Verdict verdict = verdict_from_string(response.at("verdict"));
    if (response.contains("strong_phase") && response.at("strong_phase") != "plan")
        cerr << "strong phase: " << response.at("strong_phase").get<string>() << ", no strong plan found\n";
    cerr << "verdict: " << to_string(verdict);
    if (response.contains("mode"))
        cerr << " (" << response.at("mode").get<string>() << ")";
    cerr << ", evaluations: " << response.at("statistics").at("evaluations") << '\n';

    if (request.format == ProcessFormat::json)
        write_output(opt.output, response.dump(2));
    else if (response.contains("rendered"))
        write_output(opt.output, response.at("rendered").get<string>());
    return verdict_exit(verdict);
}

int run_compile(const vector<string> &inputs, const string &output, const string &pddl_dir) {
    PlanningTask task = load_input(inputs).task();
    if (!pddl_dir.empty()) {
        fs::create_directories(pddl_dir);
        PddlFiles files = print_pddl(task);
        write_output((fs::path(pddl_dir) / "domain.pddl").string(), files.domain);
        write_output((fs::path(pddl_dir) / "problem.pddl").string(), files.problem);
    }
    if (pddl_dir.empty() || !output.empty())
        write_output(output, task_to_json(task).dump(2));
    return exit_ok;
}

string file_stem(const string &id) {
    string stem = id;
    ranges::replace(stem, '/', '_');
    return stem;
}

ActionScope scope_from_string(const string &name) {
    if (name == "full")
        return ActionScope::full;
    if (name == "bo_relevant")
        return ActionScope::bo_relevant;
    throw InputError("unknown scope '" + name + "'");
}

struct GenOptions {
    string objects;
    vector<int> goal_sizes{1};
    int samples = 5;
    uint64_t seed = 1;
    string scope = "bo_relevant";
    vector<string> only;
    string output_dir = ".";
};

vector<GeneratedInstance> generate_all(const GenOptions &opt) {
    vector<BusinessObject> objects = objects_from_json(read_json_file(opt.objects));
    vector<GeneratedInstance> all;
    for (int size : opt.goal_sizes) {
        GeneratorSpec spec;
        spec.objects = opt.only;
        spec.goal_size = size;
        spec.samples = opt.samples;
        spec.seed = opt.seed;
        spec.scope = scope_from_string(opt.scope);
        for (GeneratedInstance &instance : generate(objects, spec))
            all.push_back(move(instance));
    }
    return all;
}

int run_gen(const GenOptions &opt) {
    vector<GeneratedInstance> all = generate_all(opt);
    fs::create_directories(opt.output_dir);
    for (const GeneratedInstance &instance : all) {
        json doc = problem_to_json(instance.bundle);
        doc["objects"] = objects_to_json(instance.bundle.objects).at("objects");
        write_output((fs::path(opt.output_dir) / (file_stem(instance.id) + ".json")).string(), doc.dump(2));
    }
    cerr << all.size() << " instances written to " << opt.output_dir << '\n';
    return exit_ok;
}

struct BenchOptions {
    vector<string> inputs;
    GenOptions gen;
    string pddl_root;
    vector<string> heuristics{"ff"};
    vector<string> modes{"auto"};
    double weight = 5.0;
    bool no_helpful = false;
    long max_evals = 0;
    double timeout = 60.0;
    double strong_timeout = 0.5;
    unsigned threads = 0;
    string csv;
    string aggregate_out;
};

int run_bench(const BenchOptions &opt) {
    vector<SuiteInstance> instances;
    for (const string &input : opt.inputs) {
        vector<fs::path> files;
        if (fs::is_directory(input)) {
            for (const auto &entry : fs::recursive_directory_iterator(input)) {
                if (entry.is_regular_file() && entry.path().extension() == ".json")
                    files.push_back(entry.path());
            }
            ranges::sort(files);
        } else {
            files.emplace_back(input);
        }
        for (const fs::path &file : files) {
            ProblemBundle bundle = bundle_from_json(read_json_file(file));
            string object = bundle.objects.size() == 1 ? bundle.objects[0].id : "";
            instances.push_back({file.stem().string(), object, static_cast<int>(bundle.goal.size()),
                                 compile_bo(bundle)});
        }
    }
    if (!opt.gen.objects.empty()) {
        for (SuiteInstance &instance : compile_instances(generate_all(opt.gen)))
            instances.push_back(move(instance));
    }
    if (!opt.pddl_root.empty()) {
        for (const auto &[domain, problem] : find_pddl_pairs(opt.pddl_root)) {
            PlanningTask task = parse_pddl(read_text_file(domain), read_text_file(problem));
            int goal_size = static_cast<int>(task.goal().size());
            instances.push_back({problem.string(), "", goal_size, move(task)});
        }
    }
    vector<NamedConfig> configs;
    for (const string &mode : opt.modes) {
        for (const string &heuristic : opt.heuristics) {
            SearchConfig config;
            config.mode = mode_from_string(mode);
            config.heuristic = heuristic_from_string(heuristic);
            config.weight = opt.weight;
            config.helpful_pruning = !opt.no_helpful;
            config.max_evaluations = opt.max_evals;
            config.time_budget = opt.timeout;
            config.strong_phase_budget = opt.strong_timeout;
            configs.push_back({mode + "-" + heuristic, config});
        }
    }
    SuiteResult result = run_suite(instances, configs, opt.threads);
    if (opt.csv.empty() || opt.csv == "-") {
        write_csv(cout, result.records);
    } else {
        ofstream out(opt.csv);
        if (!out)
            throw InputError("cannot write " + opt.csv);
        write_csv(out, result.records);
    }
    if (!opt.aggregate_out.empty())
        write_output(opt.aggregate_out, result.aggregates.dump(2));
    cerr << instances.size() << " instances, " << configs.size() << " configs, " << result.records.size()
         << " runs\n";
    return exit_ok;
}

int run_validate(const vector<string> &inputs, const string &plan_file, const string &mode_name,
                 const string &certifier_name) {
    PlanningTask task = load_input(inputs).task();
    Mode mode = mode_from_string(mode_name);
    if (mode == Mode::auto_)
        throw InputError("validate needs --mode strong or weak");
    ActionTree tree = plan_from_json(task, read_json_file(plan_file));
    ValidationReport report = validate_plan(task, tree, mode, certifier_from_string(certifier_name, task));
    json doc{{"valid", report.valid}, {"message", report.message}, {"path", report.path}};
    cout << doc.dump(2) << '\n';
    if (!report.valid)
        cerr << "invalid " << to_string(mode) << " plan at " << report.path << ": " << report.message << '\n';
    return report.valid ? exit_ok : exit_negative;
}

int run_serve(const string &repo, const string &host, int port, const ServiceOptions &options) {
    PlanningService service(ModelRepository::load(repo), options);
    cerr << "serving on " << host << ":" << port << '\n';
    return service.listen(host, port) ? exit_ok : exit_input;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Planner for business-object status models"};
    app.require_subcommand(1);

    SolveOptions solve_opt;
    CLI::App *solve_cmd = app.add_subcommand("solve", "Find a plan and compile it into a process");
    solve_cmd->add_option("inputs", solve_opt.inputs, "Bundle JSON, objects + problem JSON, or PDDL domain + problem")
        ->required();
    solve_cmd->add_option("--mode", solve_opt.mode)->check(CLI::IsMember({"strong", "weak", "auto"}));
    solve_cmd->add_option("--heuristic", solve_opt.heuristic)->check(CLI::IsMember({"ff", "blind"}));
    solve_cmd->add_option("--weight", solve_opt.weight);
    solve_cmd->add_flag("--no-helpful", solve_opt.no_helpful, "Disable helpful-actions pruning");
    solve_cmd->add_option("--max-evals", solve_opt.max_evals, "0 = unlimited");
    solve_cmd->add_option("--timeout", solve_opt.timeout, "Seconds");
    solve_cmd->add_option("--strong-timeout", solve_opt.strong_timeout, "Strong phase of auto mode, seconds");
    solve_cmd->add_option("--out", solve_opt.out)->check(CLI::IsMember({"json", "dot", "bpmn"}));
    solve_cmd->add_option("-o,--output", solve_opt.output);

    vector<string> compile_inputs;
    string compile_output, compile_pddl;
    CLI::App *compile_cmd = app.add_subcommand("compile", "Compile business objects or PDDL into a task file");
    compile_cmd->add_option("inputs", compile_inputs)->required();
    compile_cmd->add_option("-o,--output", compile_output);
    compile_cmd->add_option("--pddl", compile_pddl, "Also write domain.pddl and problem.pddl here");

    GenOptions gen_opt;
    CLI::App *gen_cmd = app.add_subcommand("gen", "Generate goal instances from business objects");
    gen_cmd->add_option("objects", gen_opt.objects)->required();
    gen_cmd->add_option("--goal-size", gen_opt.goal_sizes)->delimiter(',');
    gen_cmd->add_option("--samples", gen_opt.samples, "0 = all value tuples");
    gen_cmd->add_option("--seed", gen_opt.seed);
    gen_cmd->add_option("--scope", gen_opt.scope)->check(CLI::IsMember({"full", "bo_relevant"}));
    gen_cmd->add_option("--object", gen_opt.only)->delimiter(',');
    gen_cmd->add_option("-o,--output-dir", gen_opt.output_dir);

    BenchOptions bench_opt;
    CLI::App *bench_cmd = app.add_subcommand("bench", "Run a suite and write one CSV row per run");
    bench_cmd->add_option("inputs", bench_opt.inputs, "Bundle files or directories of them");
    bench_cmd->add_option("--objects", bench_opt.gen.objects, "Generate instances from these objects");
    bench_cmd->add_option("--goal-size", bench_opt.gen.goal_sizes)->delimiter(',');
    bench_cmd->add_option("--samples", bench_opt.gen.samples);
    bench_cmd->add_option("--seed", bench_opt.gen.seed);
    bench_cmd->add_option("--scope", bench_opt.gen.scope)->check(CLI::IsMember({"full", "bo_relevant"}));
    bench_cmd->add_option("--pddl-root", bench_opt.pddl_root, "Directory of PDDL domain/problem pairs");
    bench_cmd->add_option("--heuristic", bench_opt.heuristics)->delimiter(',');
    bench_cmd->add_option("--mode", bench_opt.modes)->delimiter(',');
    bench_cmd->add_option("--weight", bench_opt.weight);
    bench_cmd->add_flag("--no-helpful", bench_opt.no_helpful);
    bench_cmd->add_option("--max-evals", bench_opt.max_evals);
    bench_cmd->add_option("--timeout", bench_opt.timeout);
    bench_cmd->add_option("--strong-timeout", bench_opt.strong_timeout);
    bench_cmd->add_option("--threads", bench_opt.threads, "0 = hardware concurrency");
    bench_cmd->add_option("--csv", bench_opt.csv);
    bench_cmd->add_option("--aggregate", bench_opt.aggregate_out);

    vector<string> validate_inputs;
    string validate_plan_file, validate_mode = "weak", certifier = "rpg";
    CLI::App *validate_cmd = app.add_subcommand("validate", "Check a plan against the strong or weak definition");
    validate_cmd->add_option("inputs", validate_inputs)->required();
    validate_cmd->add_option("--plan", validate_plan_file)->required();
    validate_cmd->add_option("--mode", validate_mode)->check(CLI::IsMember({"strong", "weak"}));
    validate_cmd->add_option("--certifier", certifier, "How FAIL leaves are proved unsolvable")
        ->check(CLI::IsMember({"rpg", "search", "oracle"}));

    string repo = ".", host = "127.0.0.1";
    int port = 8080;
    ServiceOptions service_opt;
    CLI::App *serve_cmd = app.add_subcommand("serve", "HTTP planning service");
    serve_cmd->add_option("--repo", repo, "Directory of business object files");
    serve_cmd->add_option("--host", host);
    serve_cmd->add_option("--port", port);
    serve_cmd->add_option("--timeout", service_opt.time_budget);
    serve_cmd->add_option("--strong-timeout", service_opt.strong_phase_budget);
    serve_cmd->add_option("--cors-origin", service_opt.cors_origin);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        if (*solve_cmd)
            return run_solve(solve_opt);
        if (*compile_cmd)
            return run_compile(compile_inputs, compile_output, compile_pddl);
        if (*gen_cmd)
            return run_gen(gen_opt);
        if (*bench_cmd)
            return run_bench(bench_opt);
        if (*validate_cmd)
            return run_validate(validate_inputs, validate_plan_file, validate_mode, certifier);
        if (*serve_cmd)
            return run_serve(repo, host, port, service_opt);
    } catch (const SchemaError &e) {
        cerr << "input error: " << e.what() << '\n';
    } catch (const PddlError &e) {
        cerr << "PDDL error: " << e.what() << '\n';
    } catch (const ModelError &e) {
        cerr << "model error: " << e.what() << '\n';
    } catch (const exception &e) {
        cerr << "error: " << e.what() << '\n';
    }
    return exit_input;
}
