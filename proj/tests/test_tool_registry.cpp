#include "sciqa/tool_registry.hpp"

#include "test_util.hpp"

#include <doctest.h>

using namespace sciqa;

namespace {

std::shared_ptr<Gateway> bare_mock() {
    BackendConfig config;
    config.mode = "mock";
    return make_gateway(config);
}

ToolOutcome ok(double elapsed, double cost = 0.0) {
    return ToolOutcome{true, "ok", elapsed, cost};
}

ToolOutcome fail(double elapsed = 0.01) {
    return ToolOutcome{false, "failed", elapsed, 0.0};
}

}  // namespace

TEST_CASE("builtin registry resolves canonical names and aliases") {
    ToolRegistry registry = register_builtin_tools(bare_mock());

    CHECK(registry.lookup("Captioner").name == "VideoProcessor");
    CHECK(registry.canonical_name("Captioner") == "VideoProcessor");
    CHECK(registry.lookup("WebSearch").category == ToolCategory::understanding);
    CHECK(registry.lookup("ProcedureSearch").category == ToolCategory::booklet);
    CHECK(registry.lookup("SpeechGeneration").category == ToolCategory::fixed);
    CHECK(registry.has("VideoSR"));
    CHECK_FALSE(registry.has("NoSuchTool"));
    CHECK_THROWS_AS(registry.lookup("NoSuchTool"), std::out_of_range);

    // Ten tools behind one interface.
    CHECK(registry.tool_names().size() == 10);
}

TEST_CASE("duplicate registration is a contract violation") {
    ToolRegistry registry = register_builtin_tools(bare_mock());
    CHECK_THROWS_AS(registry.register_tool(ToolDescriptor{"WebSearch"}, nullptr),
                    std::invalid_argument);
    CHECK_THROWS_AS(registry.register_tool(ToolDescriptor{"Captioner"}, nullptr),
                    std::invalid_argument);
    ToolDescriptor alias_clash{"NewTool", {"VideoSR"}};
    CHECK_THROWS_AS(registry.register_tool(alias_clash, nullptr), std::invalid_argument);
}

TEST_CASE("stub invocations succeed with canned output") {
    ToolRegistry registry = register_builtin_tools(bare_mock());
    ToolOutcome outcome = registry.invoke("VideoSR", "frame batch 1..30");
    CHECK(outcome.success);
    CHECK(outcome.output.find("upscaled") != std::string::npos);
}

TEST_CASE("empty search input is rejected before dispatch") {
    ToolRegistry registry = register_builtin_tools(bare_mock());
    CHECK_THROWS_AS(registry.invoke("WebSearch", ""), std::invalid_argument);
    CHECK_THROWS_AS(registry.invoke("WebSearch", "   "), std::invalid_argument);
}

TEST_CASE("timeouts retry per descriptor and then fail") {
    ToolRegistry registry = register_builtin_tools(bare_mock());
    // WebSearch has timeout 60 s and 1 retry. Two scripted over-timeout
    // attempts exhaust it.
    registry.script_outcomes("WebSearch", {ok(61.0), ok(61.0)});
    ToolOutcome timed_out = registry.invoke("WebSearch", "query");
    CHECK_FALSE(timed_out.success);
    CHECK(timed_out.output.find("timeout") != std::string::npos);
    CHECK(timed_out.elapsed_s == doctest::Approx(122.0));

    // One timeout then a good attempt succeeds, accumulating elapsed time.
    registry.script_outcomes("WebSearch", {ok(61.0), ok(0.5, 0.001)});
    ToolOutcome recovered = registry.invoke("WebSearch", "query");
    CHECK(recovered.success);
    CHECK(recovered.elapsed_s == doctest::Approx(61.5));
    CHECK(recovered.cost_usd == doctest::Approx(0.001));
}

TEST_CASE("plain failures are returned without retry") {
    ToolRegistry registry = register_builtin_tools(bare_mock());
    registry.script_outcomes("PaperSearch", {fail(), ok(0.5)});
    ToolOutcome outcome = registry.invoke("PaperSearch", "query");
    CHECK_FALSE(outcome.success);
    // The scripted success is still queued for the next call.
    CHECK(registry.invoke("PaperSearch", "query").success);
}

TEST_CASE("profiling: 18 of 20 probes succeeding gives 0.90 exactly") {
    ToolRegistry registry = register_builtin_tools(bare_mock());
    std::vector<ToolOutcome> script;
    for (int i = 0; i < 20; ++i) {
        script.push_back(i < 18 ? ok(1.0, 0.002) : fail(1.0));
    }
    registry.script_outcomes("WebSearch", script);
    CostProfile profile = profile_tool(registry, "WebSearch", 20, uint64_t{99});
    CHECK(profile.success_prob == 0.90);
    CHECK(profile.sample_count == 20);
    CHECK(profile.assumed == false);
    CHECK(profile.probe_seed == 99);
}

TEST_CASE("profiling a constant-latency stub") {
    ToolRegistry registry = register_builtin_tools(bare_mock());
    std::vector<ToolOutcome> script(20, ok(2.0, 0.0));
    registry.script_outcomes("VideoSR", script);
    CostProfile profile = profile_tool(registry, "VideoSR", 20, uint64_t{1});
    CHECK(profile.mean_latency_s == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(profile.mean_cost_usd == 0.0);
    CHECK(profile.success_prob == 1.0);

    CHECK_THROWS_AS(profile_tool(registry, "VideoSR", 0, uint64_t{1}), std::invalid_argument);
}

TEST_CASE("profile means match a recomputed mean over the retained samples") {
    ToolRegistry registry = register_builtin_tools(bare_mock());
    std::vector<ToolOutcome> script;
    double latency_sum = 0.0, cost_sum = 0.0;
    for (int i = 0; i < 20; ++i) {
        double latency = 0.25 * (i + 1);
        double cost = 0.0001 * i;
        latency_sum += latency;
        cost_sum += cost;
        script.push_back(ok(latency, cost));
    }
    registry.script_outcomes("SafetyAlert", script);
    CostProfile profile = profile_tool(registry, "SafetyAlert", 20, uint64_t{5});
    CHECK(profile.mean_latency_s == doctest::Approx(latency_sum / 20).epsilon(1e-9));
    CHECK(profile.mean_cost_usd == doctest::Approx(cost_sum / 20).epsilon(1e-9));
}

TEST_CASE("seeded probe inputs are reproducible and non-empty") {
    auto a = seeded_probe_inputs(42);
    auto b = seeded_probe_inputs(42);
    auto c = seeded_probe_inputs(43);
    bool any_difference = false;
    for (int i = 0; i < 20; ++i) {
        CHECK(a(i) == b(i));
        CHECK_FALSE(a(i).empty());
        if (a(i) != c(i)) any_difference = true;
    }
    CHECK(any_difference);
}

TEST_CASE("the shipped profile fixture matches the reference numbers") {
    ProfileMap profiles = load_profile_store(source_path("data/profiles.json"));
    CHECK(profiles.at("WebSearch").mean_latency_s == doctest::Approx(21.89));
    CHECK(profiles.at("WebSearch").mean_cost_usd == doctest::Approx(0.0139));
    CHECK(profiles.at("WebSearch").success_prob == doctest::Approx(0.88));
    CHECK(profiles.at("WebSearch").sample_count == 20);
    CHECK(profiles.size() == 7);
}

TEST_CASE("plan cost estimation sums, multiplies and scales with fps") {
    ProfileMap profiles = load_profile_store(source_path("data/profiles.json"));

    CandidatePlan plan;
    plan.number = 1;
    plan.steps = {{"WebSearch", "q"}, {"PaperSearch", "q"}};
    PlanCostEstimate estimate = estimate_plan_cost(plan, profiles);
    CHECK(estimate.latency_s == doctest::Approx(39.30).epsilon(1e-6));
    CHECK(estimate.cost_usd == doctest::Approx(0.0239).epsilon(1e-6));
    CHECK(estimate.success_prob == doctest::Approx(0.66).epsilon(1e-6));

    CandidatePlan video;
    video.number = 2;
    video.steps = {{"VideoProcessor", "v"}};
    PlanCostEstimate at_2fps = estimate_plan_cost(video, profiles, 2.0);
    CHECK(at_2fps.latency_s == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(at_2fps.cost_usd == doctest::Approx(0.0002).epsilon(1e-9));
    CHECK(at_2fps.success_prob == doctest::Approx(0.93));

    CandidatePlan sure;
    sure.number = 3;
    sure.steps = {{"VideoSR", "v"}};
    CHECK(estimate_plan_cost(sure, profiles).success_prob == doctest::Approx(1.0));
}

TEST_CASE("success product never exceeds the weakest step") {
    ProfileMap profiles = load_profile_store(source_path("data/profiles.json"));
    CandidatePlan plan;
    plan.steps = {{"WebSearch", "q"}, {"PaperSearch", "q"}, {"SafetyAlert", "q"}};
    PlanCostEstimate estimate = estimate_plan_cost(plan, profiles);
    double weakest = 0.72;  // SafetyAlert
    CHECK(estimate.success_prob <= weakest + 1e-12);
}

TEST_CASE("concatenating plans adds their latencies and costs exactly") {
    ProfileMap profiles = load_profile_store(source_path("data/profiles.json"));
    CandidatePlan a, b, joined;
    a.steps = {{"WebSearch", "q"}, {"VideoSR", "v"}};
    b.steps = {{"PaperSearch", "q"}, {"EntityRecognition", "t"}};
    joined.steps = a.steps;
    joined.steps.insert(joined.steps.end(), b.steps.begin(), b.steps.end());

    PlanCostEstimate ea = estimate_plan_cost(a, profiles);
    PlanCostEstimate eb = estimate_plan_cost(b, profiles);
    PlanCostEstimate ej = estimate_plan_cost(joined, profiles);
    CHECK(ej.latency_s == doctest::Approx(ea.latency_s + eb.latency_s).epsilon(1e-12));
    CHECK(ej.cost_usd == doctest::Approx(ea.cost_usd + eb.cost_usd).epsilon(1e-12));
    CHECK(ej.success_prob ==
          doctest::Approx(ea.success_prob * eb.success_prob).epsilon(1e-12));
}

TEST_CASE("unprofiled tools fall back to the flagged assumed profile") {
    CandidatePlan plan;
    plan.steps = {{"IllustrationGeneration", "draw"}};
    PlanCostEstimate estimate = estimate_plan_cost(plan, {});
    CostProfile assumed = assumed_profile();
    CHECK(assumed.assumed);
    CHECK(estimate.latency_s == doctest::Approx(assumed.mean_latency_s));
    CHECK(estimate.cost_usd == doctest::Approx(assumed.mean_cost_usd));
    CHECK(estimate.success_prob == doctest::Approx(assumed.success_prob));
}

TEST_CASE("alias and canonical invocations behave identically") {
    ToolRegistry registry = register_builtin_tools(bare_mock());
    registry.script_outcomes("VideoProcessor", {ok(1.0, 0.01), ok(1.0, 0.01)});
    ToolOutcome via_alias = registry.invoke("Captioner", "describe");
    ToolOutcome via_canonical = registry.invoke("VideoProcessor", "describe");
    CHECK(via_alias.success == via_canonical.success);
    CHECK(via_alias.output == via_canonical.output);
    CHECK(via_alias.elapsed_s == via_canonical.elapsed_s);
    CHECK(via_alias.cost_usd == via_canonical.cost_usd);
}

TEST_CASE("profile store round-trips through its JSON file format") {
    auto dir = test_tmp_dir("profiles");
    ProfileMap profiles;
    profiles["WebSearch"] = CostProfile{21.89, 0.0139, 0.88, 20, false, 42};
    profiles["Oddball"] = assumed_profile();
    save_profile_store(dir / "store.json", profiles);

    ProfileMap loaded = load_profile_store(dir / "store.json");
    CHECK(loaded.at("WebSearch").mean_latency_s == doctest::Approx(21.89));
    CHECK(loaded.at("WebSearch").probe_seed == 42);
    CHECK(loaded.at("Oddball").assumed);

    // The file uses the documented keys.
    std::string raw = read_file(dir / "store.json");
    CHECK(raw.find("mean_latency_s") != std::string::npos);
    CHECK(raw.find("mean_cost_usd") != std::string::npos);
    CHECK(raw.find("success_prob") != std::string::npos);
    CHECK(raw.find("sample_count") != std::string::npos);
}
