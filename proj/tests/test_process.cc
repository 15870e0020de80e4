#include "support.h"

#include "sam/experiments.h"
#include "sam/process.h"
#include "sam/search.h"

#include <doctest.h>

#include <random>
#include <set>

using namespace sam;
using namespace sam::testing;

namespace {

ActionTree cq_weak_plan(const PlanningTask &task) {
    return plan_from_json(task, read_json_file(data_path("cq_weak_plan.json")));
}

std::set<std::string> task_names(const ProcessGraph &g, const std::vector<int> &ids) {
    std::set<std::string> out;
    for (int id : ids)
        if (g.node(id).kind == ProcessNodeKind::task)
            out.insert(g.node(id).name);
    return out;
}

// Tasks reachable from an AND split's branch before its join, per branch.
std::vector<std::vector<int>> parallel_branches(const ProcessGraph &g, int split) {
    std::vector<std::vector<int>> branches;
    for (int e : g.out_edges(split)) {
        std::vector<int> branch;
        int id = g.edges[static_cast<size_t>(e)].to;
        while (g.node(id).kind == ProcessNodeKind::task) {
            branch.push_back(id);
            id = g.edges[static_cast<size_t>(g.out_edges(id).front())].to;
        }
        branches.push_back(branch);
    }
    return branches;
}

} // namespace

TEST_CASE("CQ weak plan becomes the expected process") {
    PlanningTask task = cq_task();
    ActionTree plan = cq_weak_plan(task);
    ProcessGraph g = plan_to_process(task, plan);
    CHECK(check_process_graph(g).empty());
    CHECK(g.kind_counts() == std::map<std::string, int>{{"and_join", 1}, {"and_split", 1}, {"end", 1}, {"start", 1},
                                                         {"task", 8}, {"xor_join", 2}, {"xor_split", 1}});

    int may_fail = 0;
    for (const ProcessNode &n : g.nodes)
        may_fail += n.may_fail;
    CHECK(may_fail == 3);

    int split = -1;
    for (const ProcessNode &n : g.nodes)
        if (n.kind == ProcessNodeKind::and_split)
            split = n.id;
    REQUIRE(split >= 0);
    auto branches = parallel_branches(g, split);
    REQUIRE(branches.size() == 2);
    std::set<std::string> covered;
    for (const auto &b : branches) {
        CHECK(b.size() == 1);
        auto names = task_names(g, b);
        covered.insert(names.begin(), names.end());
    }
    CHECK(covered == std::set<std::string>{"Check CQ Completeness", "Check CQ Consistency"});

    CHECK(check_language_preservation(task, plan, g).empty());
}

TEST_CASE("pipeline stages on CQ") {
    PlanningTask task = cq_task();
    ActionTree plan = cq_weak_plan(task);
    StrippedTree stripped = strip_failed(task, plan);
    REQUIRE(stripped.root != nullptr);
    CHECK(stripped.root->name == "Check CQ Completeness");
    CHECK(stripped.root->may_fail);
    CHECK(stripped.root->branches.size() == 1);
    CHECK(stripped.stop_leaves == 2);

    ProcessFragment split = split_checks(stripped);
    ProcessFragment merged = merge_identical_subtrees(split);
    CHECK(merged.units.size() < split.units.size());
    int shared = 0;
    for (const auto &u : merged.units)
        shared += u.references > 1;
    CHECK(shared >= 1);

    ProcessGraph closed = close_graph(merged);
    CHECK(check_process_graph(closed).empty());
    CHECK(closed.kind_counts().count("and_split") == 0);
    CHECK(check_language_preservation(task, plan, closed).empty());
}

TEST_CASE("json round-trip and renderings") {
    PlanningTask task = cq_task();
    ProcessGraph g = plan_to_process(task, cq_weak_plan(task));
    CHECK(process_from_json(process_to_json(g)) == g);
    CHECK(process_from_json(nlohmann::json::parse(emit(g, ProcessFormat::json))) == g);

    std::string dot = emit(g, ProcessFormat::dot);
    CHECK(dot.starts_with("digraph"));
    CHECK(dot.find("Check CQ Completeness") != std::string::npos);

    std::string bpmn = emit(g, ProcessFormat::bpmn_xml);
    CHECK(bpmn.find("<parallelGateway") != std::string::npos);
    CHECK(bpmn.find("<exclusiveGateway") != std::string::npos);
    CHECK(bpmn.find("mayFail=\"true\"") != std::string::npos);

    CHECK(process_format_from_string("bpmn") == ProcessFormat::bpmn_xml);
    CHECK_THROWS(process_format_from_string("svg"));
}

TEST_CASE("empty plan is start to end") {
    PlanningTask task = compile_bo(cq_objects(), {{"CQ.archiving", "notArchived", false}}, {}, ActionScope::full);
    ProcessGraph g = plan_to_process(task, ActionTree::stop());
    CHECK(g.kind_counts() == std::map<std::string, int>{{"end", 1}, {"start", 1}});
    REQUIRE(g.edges.size() == 1);
    CHECK(check_process_graph(g).empty());
    CHECK(check_language_preservation(task, ActionTree::stop(), g).empty());
}

TEST_CASE("interference") {
    PlanningTask task = cq_task();
    ActionId comp = action_id(task, "Check CQ Completeness");
    ActionId cons = action_id(task, "Check CQ Consistency");
    ActionId submit = action_id(task, "Submit CQ");
    ActionId archive = action_id(task, "Archive CQ");
    CHECK_FALSE(tasks_interact(task, comp, cons));
    ActionId approval = action_id(task, "Check CQ Approval Status");
    CHECK(tasks_interact(task, comp, approval));
    CHECK(tasks_interact(task, approval, comp));
    CHECK_FALSE(tasks_interact(task, comp, submit));
    CHECK(tasks_interact(task, submit, archive));
    CHECK(tasks_interact(task, archive, archive));
}

namespace {

// Returns the number of AND splits.
int check_invariants(const PlanningTask &task, const ActionTree &tree) {
    ProcessGraph g = plan_to_process(task, tree);
    REQUIRE(check_process_graph(g).empty());
    REQUIRE(check_language_preservation(task, tree, g).empty());
    REQUIRE(process_from_json(process_to_json(g)) == g);

    int tasks = 0, splits = 0;
    for (const ProcessNode &n : g.nodes) {
        if (n.kind == ProcessNodeKind::task) {
            ++tasks;
            REQUIRE(g.in_edges(n.id).size() >= 1);
            REQUIRE(g.out_edges(n.id).size() == 1);
        }
        if (n.kind == ProcessNodeKind::xor_split)
            REQUIRE(g.out_edges(n.id).size() >= 2);
        if (n.kind != ProcessNodeKind::and_split)
            continue;
        ++splits;
        auto branches = parallel_branches(g, n.id);
        REQUIRE(branches.size() >= 2);
        for (size_t a = 0; a < branches.size(); ++a)
            for (size_t b = a + 1; b < branches.size(); ++b)
                for (int x : branches[a])
                    for (int y : branches[b])
                        REQUIRE_FALSE(tasks_interact(task, g.node(x).action, g.node(y).action));
    }
    REQUIRE(tasks <= tree.count_actions());
    return splits;
}

} // namespace

TEST_CASE("random plans keep their invariants") {
    std::mt19937_64 rng(41);
    int checked = 0;
    for (int i = 0; i < 600; ++i) {
        PlanningTask task = random_task(rng);
        SearchConfig c;
        c.helpful_pruning = false;
        SearchResult r = solve(task, c);
        if (!r.tree)
            continue;
        ++checked;
        check_invariants(task, *r.tree);
    }
    CHECK(checked > 200);
}

TEST_CASE("plans over two CQ objects keep their invariants") {
    std::vector<BusinessObject> objects = cq_objects();
    objects.push_back(rename_object(objects[0], "CQ2"));
    int checked = 0, splits = 0;
    for (int size : {1, 2, 3}) {
        GeneratorSpec spec;
        spec.goal_size = size;
        spec.samples = 3;
        spec.seed = 7;
        spec.scope = ActionScope::full;
        for (const GeneratedInstance &g : generate(objects, spec)) {
            PlanningTask task = compile_bo(g.bundle);
            SearchConfig c;
            c.max_evaluations = 5000;
            SearchResult r = solve(task, c);
            if (!r.tree)
                continue;
            ++checked;
            splits += check_invariants(task, *r.tree);
        }
    }
    CHECK(checked > 20);
    CHECK(splits > 0);
}
