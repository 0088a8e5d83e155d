#include "sciqa/plan_evaluator.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <random>

using namespace sciqa;

namespace {

const IdfFn kZeroIdf = [](const std::string&) { return 0.0; };

ProfileMap paper_profiles() {
    return load_profile_store(source_path("data/profiles.json"));
}

CandidatePlan make_plan(int number, const std::string& description,
                        std::vector<PlanStep> steps) {
    CandidatePlan plan;
    plan.number = number;
    plan.description = description;
    plan.steps = std::move(steps);
    return plan;
}

std::shared_ptr<MockGateway> scripted_gateway(const std::vector<std::string>& replies,
                                              const std::string& role = "evaluator") {
    static int counter = 0;
    auto dir = test_tmp_dir("evaluator_" + std::to_string(counter++));
    nlohmann::json entries = nlohmann::json::array();
    int occ = 0;
    for (const auto& reply : replies) {
        entries.push_back({{"role", role}, {"cycle", 0}, {"occurrence", ++occ},
                           {"response", reply}, {"elapsed_s", 0.2}});
    }
    BackendConfig config;
    config.mode = "mock";
    config.scenario_path = write_file(dir / "s.json", entries.dump()).string();
    return std::make_shared<MockGateway>(config);
}

}  // namespace

TEST_CASE("combined_cost reproduces the reference table") {
    struct Row {
        double latency, money, expected;
    };
    // Hand arithmetic over the seven profiled tools.
    const Row rows[] = {
        {21.89, 0.0139, 35.79},  // WebSearch
        {17.41, 0.010, 27.41},   // PaperSearch
        {25.0, 0.0001, 25.10},   // VideoProcessor at 1 fps
        {53.0, 0.0001, 53.10},   // VideoSR at 1 fps
        {28.17, 0.0178, 45.97},  // ProcedureSearch
        {10.45, 0.0064, 16.85},  // EntityRecognition
        {26.29, 0.0153, 41.59},  // SafetyAlert
    };
    for (const auto& row : rows) {
        CHECK(combined_cost(row.latency, row.money) ==
              doctest::Approx(row.expected).epsilon(1e-6));
    }
    CHECK(combined_cost(0, 0) == 0.0);
    CHECK_THROWS_AS(combined_cost(-1, 0), std::invalid_argument);
    CHECK_THROWS_AS(combined_cost(0, -0.01), std::invalid_argument);
}

TEST_CASE("single-plan pools use the midpoint normalization") {
    ProfileMap profiles = paper_profiles();
    SolutionPool pool;
    pool.plans = {make_plan(1, "solo", {{"WebSearch", "query"}})};
    ObjectiveResult result = objective_score(pool.plans[0], profiles, kZeroIdf, pool);
    double expected = 0.5 * (0.88 * 0.5) + 0.5 * 0.5;
    CHECK(result.value == doctest::Approx(expected).epsilon(1e-12));
    CHECK(result.detail.at("success_prob") == doctest::Approx(0.88));
    CHECK(result.detail.at("cost") == doctest::Approx(35.79).epsilon(1e-6));
}

TEST_CASE("two plans with identical keywords: hand-computed objectives") {
    ProfileMap profiles = paper_profiles();
    SolutionPool pool;
    pool.plans = {
        make_plan(1, "inspect the spin", {{"WebSearch", "spin force"}}),
        make_plan(2, "inspect the spin", {{"PaperSearch", "spin force"}}),
    };
    ObjectiveResult one = objective_score(pool.plans[0], profiles, kZeroIdf, pool);
    ObjectiveResult two = objective_score(pool.plans[1], profiles, kZeroIdf, pool);

    // costs 35.79 vs 27.41 -> economies 0 and 1; identical keywords -> idf
    // normalization collapses to 0.5 for both.
    CHECK(one.detail.at("economy") == doctest::Approx(0.0));
    CHECK(two.detail.at("economy") == doctest::Approx(1.0));
    CHECK(one.value == doctest::Approx(0.5 * (0.88 * 0.5) + 0.0).epsilon(1e-9));
    CHECK(two.value == doctest::Approx(0.5 * (0.75 * 0.5) + 0.5).epsilon(1e-9));
}

TEST_CASE("a plan dominating on success, cost and idf scores at least its rivals") {
    ProfileMap profiles;
    profiles["Sure"] = CostProfile{1.0, 0.0, 1.0, 20};
    profiles["Risky"] = CostProfile{50.0, 0.02, 0.6, 20};
    IdfFn idf_of = [](const std::string& k) { return k == "rare" ? 4.0 : 0.1; };

    SolutionPool pool;
    pool.plans = {
        make_plan(1, "rare", {{"Sure", "rare"}}),
        make_plan(2, "common", {{"Risky", "common"}}),
        make_plan(3, "common", {{"Risky", "common common"}}),
    };
    ObjectiveResult dominant = objective_score(pool.plans[0], profiles, idf_of, pool);
    for (size_t i = 1; i < pool.plans.size(); ++i) {
        ObjectiveResult rival = objective_score(pool.plans[i], profiles, idf_of, pool);
        CHECK(dominant.value >= rival.value);
    }
    // Dominant: economy 1 and idf_norm 1 -> objective = 0.5*idf_norm*1 + 0.5.
    CHECK(dominant.value == doctest::Approx(0.5 * 1.0 + 0.5).epsilon(1e-9));
}

TEST_CASE("unknown tools contribute success 0.5 and flag the detail map") {
    SolutionPool pool;
    pool.plans = {make_plan(1, "mystery", {{"UnknownTool", "x"}})};
    ObjectiveResult result = objective_score(pool.plans[0], {}, kZeroIdf, pool);
    CHECK(result.detail.at("success_prob") == doctest::Approx(0.5));
    CHECK(result.detail.at("unknown_tools") == doctest::Approx(1.0));
}

TEST_CASE("perceptual scores come back verbatim, clamped, defaulted") {
    SolutionPool pool;
    pool.plans = {make_plan(1, "a", {{"WebSearch", "x"}}),
                  make_plan(2, "b", {{"WebSearch", "x"}}),
                  make_plan(3, "c", {{"WebSearch", "x"}})};
    Query query{"why", false};
    KnowledgeState knowledge;

    SUBCASE("verbatim map") {
        auto gateway = scripted_gateway({R"({"1": 0.9, "2": 0.4, "3": 0.5})"});
        auto scores = perceptual_score(pool, query, knowledge, *gateway);
        CHECK(scores.at(1) == doctest::Approx(0.9));
        CHECK(scores.at(2) == doctest::Approx(0.4));
    }
    SUBCASE("missing plan defaults to 0.5") {
        auto gateway = scripted_gateway({R"({"1": 0.9, "2": 0.4})"});
        auto scores = perceptual_score(pool, query, knowledge, *gateway);
        CHECK(scores.at(3) == doctest::Approx(0.5));
    }
    SUBCASE("out-of-range values are clamped") {
        auto gateway = scripted_gateway({R"({"1": 1.7, "2": -0.4, "3": 0.2})"});
        auto scores = perceptual_score(pool, query, knowledge, *gateway);
        CHECK(scores.at(1) == doctest::Approx(1.0));
        CHECK(scores.at(2) == doctest::Approx(0.0));
    }
    SUBCASE("unparseable reply retries once, then objective-only fallback") {
        auto gateway = scripted_gateway({"no json here", "still nothing"});
        auto scores = perceptual_score(pool, query, knowledge, *gateway);
        for (const auto& plan : pool.plans) {
            CHECK(scores.at(plan.number) == doctest::Approx(0.5));
        }
    }
    SUBCASE("backend failure falls back to 0.5 without retry loops") {
        auto gateway = scripted_gateway({});
        auto scores = perceptual_score(pool, query, knowledge, *gateway);
        CHECK(scores.at(1) == doctest::Approx(0.5));
    }
}

TEST_CASE("select_best takes the composite argmax with lowest-number ties") {
    SolutionPool pool;
    pool.plans = {make_plan(1, "a", {{"T", "x"}}), make_plan(2, "b", {{"T", "x"}})};

    std::vector<PlanScore> scores(2);
    scores[0].plan_number = 1;
    scores[0].objective = 0.4;
    scores[0].perceptual = 0.8;
    scores[1].plan_number = 2;
    scores[1].objective = 0.6;
    scores[1].perceptual = 0.3;

    // lambda = 1: composites 1.2 vs 0.9 -> plan 1.
    CHECK(select_best(pool, scores, 1.0).number == 1);
    // lambda = 0 ignores perceptual: 0.4 vs 0.6 -> plan 2.
    CHECK(select_best(pool, scores, 0.0).number == 2);

    SolutionPool tie_pool;
    tie_pool.plans = {make_plan(3, "c", {{"T", "x"}}), make_plan(5, "d", {{"T", "x"}})};
    std::vector<PlanScore> tie(2);
    tie[0].plan_number = 3;
    tie[0].objective = 0.5;
    tie[1].plan_number = 5;
    tie[1].objective = 0.5;
    CHECK(select_best(tie_pool, tie, 1.0).number == 3);

    CHECK_THROWS_AS(select_best(SolutionPool{}, {}, 1.0), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Property tests over randomized pools.
// ---------------------------------------------------------------------------

namespace {

struct RandomPool {
    SolutionPool pool;
    ProfileMap profiles;
    std::vector<PlanScore> scores;
};

RandomPool random_pool(std::mt19937& rng) {
    static const std::vector<std::string> tools = {"ToolA", "ToolB", "ToolC", "ToolD"};
    static const std::vector<std::string> words = {
        "magnet", "pressure", "acid", "lens", "spin", "flame", "crystal", "wave"};
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    RandomPool out;
    for (const auto& tool : tools) {
        out.profiles[tool] = CostProfile{1.0 + 60.0 * unit(rng), 0.02 * unit(rng),
                                         0.3 + 0.7 * unit(rng), 20};
    }
    int n = 2 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) {
        CandidatePlan plan;
        plan.number = i + 1;
        plan.description = words[rng() % words.size()] + " " + words[rng() % words.size()];
        int steps = 1 + static_cast<int>(rng() % 3);
        for (int s = 0; s < steps; ++s) {
            plan.steps.push_back(PlanStep{tools[rng() % tools.size()],
                                          words[rng() % words.size()]});
        }
        out.pool.plans.push_back(std::move(plan));
    }

    IdfFn idf_of = [](const std::string& k) {
        return static_cast<double>(k.size() % 5);  // deterministic pseudo-IDF
    };
    for (const auto& plan : out.pool.plans) {
        PlanScore score;
        score.plan_number = plan.number;
        score.objective = objective_score(plan, out.profiles, idf_of, out.pool).value;
        score.perceptual = unit(rng);
        score.composite = score.objective + score.perceptual;
        out.scores.push_back(score);
    }
    return out;
}

}  // namespace

TEST_CASE("selection properties hold over 1000 randomized pools") {
    std::mt19937 rng(20250808);
    IdfFn idf_of = [](const std::string& k) { return static_cast<double>(k.size() % 5); };

    for (int trial = 0; trial < 1000; ++trial) {
        RandomPool rp = random_pool(rng);

        int chosen = select_best(rp.pool, rp.scores, 1.0).number;

        // Shift invariance: adding a constant to every composite (via the
        // objective term) leaves the argmax unchanged.
        std::vector<PlanScore> shifted = rp.scores;
        double shift = (trial % 2 == 0) ? 3.25 : -1.5;
        for (auto& s : shifted) s.objective += shift;
        CHECK(select_best(rp.pool, shifted, 1.0).number == chosen);

        // Positive cost scaling: multiplying every latency and money cost by
        // a constant leaves the min-max economies, hence the objectives and
        // the selection, unchanged.
        double k = (trial % 3 == 0) ? 7.0 : 0.25;
        ProfileMap scaled = rp.profiles;
        for (auto& [name, profile] : scaled) {
            profile.mean_latency_s *= k;
            profile.mean_cost_usd *= k;
        }
        for (size_t i = 0; i < rp.pool.plans.size(); ++i) {
            double before = rp.scores[i].objective;
            double after =
                objective_score(rp.pool.plans[i], scaled, idf_of, rp.pool).value;
            CHECK(after == doctest::Approx(before).epsilon(1e-9));
        }

        // lambda = 0 reduces selection to the objective argmax.
        int objective_best = 0;
        double best_objective = -1.0;
        for (const auto& s : rp.scores) {
            if (s.objective > best_objective ||
                (s.objective == best_objective && s.plan_number < objective_best)) {
                best_objective = s.objective;
                objective_best = s.plan_number;
            }
        }
        CHECK(select_best(rp.pool, rp.scores, 0.0).number == objective_best);

        // Bounds: objective and perceptual in [0,1], composite in [0, 1+lambda].
        for (const auto& s : rp.scores) {
            CHECK(s.objective >= 0.0);
            CHECK(s.objective <= 1.0);
            CHECK(s.perceptual >= 0.0);
            CHECK(s.perceptual <= 1.0);
            CHECK(s.objective + 1.0 * s.perceptual <= 2.0);
        }

        // Determinism: rescoring the identical pool reproduces the values.
        for (size_t i = 0; i < rp.pool.plans.size(); ++i) {
            CHECK(objective_score(rp.pool.plans[i], rp.profiles, idf_of, rp.pool).value ==
                  doctest::Approx(rp.scores[i].objective).epsilon(1e-15));
        }
    }
}
