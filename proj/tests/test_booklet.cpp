#include "sciqa/booklet.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <memory>

using namespace sciqa;

namespace {

struct Fixture {
    std::shared_ptr<Gateway> gateway;
    std::unique_ptr<ToolRegistry> registry;
    ProfileMap profiles;
    std::unique_ptr<BookletBuilder> builder;
};

std::unique_ptr<Fixture> make_fixture(const std::string& scenario_file, BookletConfig config) {
    auto f = std::make_unique<Fixture>();
    BackendConfig bc;
    bc.mode = "mock";
    if (!scenario_file.empty()) {
        bc.scenario_path = fixture_path("scenarios/" + scenario_file).string();
    }
    bc.prices.set("default", PriceEntry{2e-6, 8e-6});
    f->gateway = make_gateway(bc);
    f->registry = std::make_unique<ToolRegistry>(register_builtin_tools(f->gateway));
    f->profiles = load_profile_store(source_path("data/profiles.json"));

    EngineDeps deps;
    deps.gateway = f->gateway;
    deps.registry = f->registry.get();
    deps.profiles = f->profiles;
    f->builder = std::make_unique<BookletBuilder>(deps, config);
    return f;
}

BookletSpec minimal_spec() {
    BookletSpec spec;
    spec.topic = "Tiny Experiment";
    spec.principle = "A principle.";
    spec.intro = "An intro.";
    spec.materials = {MaterialItem{"cup", "", ""}};
    spec.steps = {StepCard{1, "Do the thing.", "", ""}};
    spec.safety = {SafetyNote{"Be careful.", Severity::caution, ""}};
    spec.summary = "A summary.";
    return spec;
}

// Section anchors, in contract order.
const std::vector<std::string> kAnchors = {
    "<section id=\"intro\">", "<section id=\"materials\">", "<section id=\"steps\">",
    "<section id=\"safety\">", "<section id=\"summary\">"};

void check_five_sections_in_order(const std::string& html) {
    size_t position = 0;
    for (const auto& anchor : kAnchors) {
        size_t found = html.find(anchor);
        REQUIRE_MESSAGE(found != std::string::npos, anchor);
        CHECK(found >= position);
        position = found;
        // Each anchor appears exactly once.
        CHECK(html.find(anchor, found + 1) == std::string::npos);
    }
}

}  // namespace

TEST_CASE("entity replies parse into deduplicated ordered lists") {
    CHECK(parse_entity_list("beaker; vinegar; baking soda") ==
          std::vector<std::string>{"beaker", "vinegar", "baking soda"});
    CHECK(parse_entity_list("beaker; beaker") == std::vector<std::string>{"beaker"});
    CHECK(parse_entity_list("a, b\nc") == std::vector<std::string>{"a", "b", "c"});
    CHECK(parse_entity_list("").empty());
    CHECK(parse_entity_list(" ;; ; ").empty());
}

TEST_CASE("extract_entities invokes the recognizer and survives failures") {
    auto f = make_fixture("", BookletConfig{});
    f->registry->script_outcomes("EntityRecognition",
                                 {ToolOutcome{true, "beaker; vinegar; baking soda", 0.1, 0.0},
                                  ToolOutcome{false, "model offline", 0.1, 0.0},
                                  ToolOutcome{true, "", 0.1, 0.0}});
    CHECK(extract_entities("mix vinegar into the beaker", *f->registry).size() == 3);
    CHECK(extract_entities("mix vinegar into the beaker", *f->registry).empty());
    CHECK(extract_entities("mix vinegar into the beaker", *f->registry).empty());
    CHECK_THROWS_AS(extract_entities("", *f->registry), std::invalid_argument);
}

TEST_CASE("render_html emits the five sections exactly once, in order") {
    std::string html = render_html(minimal_spec());
    check_five_sections_in_order(html);
    CHECK(html.find("Tiny Experiment") != std::string::npos);
}

TEST_CASE("danger notes carry the danger style marker") {
    BookletSpec spec = minimal_spec();
    spec.safety = {SafetyNote{"Never use glass.", Severity::danger, ""}};
    std::string html = render_html(spec);
    CHECK(html.find("class=\"safety danger\"") != std::string::npos);

    spec.safety = {SafetyNote{"Mind the floor.", Severity::caution, ""}};
    CHECK(render_html(spec).find("class=\"safety caution\"") != std::string::npos);
}

TEST_CASE("render_html escapes markup in content") {
    BookletSpec spec = minimal_spec();
    spec.intro = "Mix <b>fast</b> & stir";
    std::string html = render_html(spec);
    CHECK(html.find("Mix <b>fast</b>") == std::string::npos);
    CHECK(html.find("Mix &lt;b&gt;fast&lt;/b&gt; &amp; stir") != std::string::npos);
}

TEST_CASE("render_html is deterministic in its input spec") {
    BookletSpec spec = minimal_spec();
    CHECK(render_html(spec) == render_html(spec));
}

TEST_CASE("golden spec renders byte-identically to the golden document") {
    auto golden_spec_path = fixture_path("booklet/golden_spec.json");
    auto golden_html_path = fixture_path("booklet/golden_booklet.html");
    nlohmann::json j = nlohmann::json::parse(read_file(golden_spec_path));
    BookletSpec spec = booklet_spec_from_json(j);
    CHECK(render_html(spec) == read_file(golden_html_path));
}

TEST_CASE("booklet spec round-trips through JSON") {
    BookletSpec spec = minimal_spec();
    spec.verdict = QualityVerdict{90, 85, 78, 88, true};
    spec.grounded = true;
    BookletSpec back = booklet_spec_from_json(booklet_spec_to_json(spec));
    CHECK(back.topic == spec.topic);
    CHECK(back.materials.size() == 1);
    CHECK(back.steps.size() == 1);
    CHECK(back.safety[0].severity == Severity::caution);
    CHECK(back.verdict.pass);
    CHECK(booklet_spec_to_json(back) == booklet_spec_to_json(spec));
}

TEST_CASE("gather_assets fills references and writes the bundle files") {
    auto f = make_fixture("", BookletConfig{});
    auto out_dir = test_tmp_dir("booklet_assets");

    BookletSpec spec = minimal_spec();
    spec.materials = {MaterialItem{"plastic bottle", "", ""}, MaterialItem{"dropper", "", ""},
                      MaterialItem{"water", "", ""}};
    BookletSpec gathered = gather_assets(spec, *f->registry, out_dir);

    REQUIRE(gathered.materials.size() == 3);
    for (const auto& material : gathered.materials) {
        CHECK(material.image_ref.rfind("assets/", 0) == 0);
        CHECK(material.purchase_link.rfind("https://", 0) == 0);
        CHECK(std::filesystem::exists(out_dir / material.image_ref));
    }
    for (const auto& step : gathered.steps) {
        CHECK(std::filesystem::exists(out_dir / step.illustration_ref));
        CHECK(std::filesystem::exists(out_dir / step.narration_ref));
    }
    for (const auto& note : gathered.safety) {
        CHECK(std::filesystem::exists(out_dir / note.audio_ref));
    }
}

TEST_CASE("failed asset fetches leave typed placeholders and still render") {
    auto f = make_fixture("", BookletConfig{});
    auto out_dir = test_tmp_dir("booklet_placeholders");

    BookletSpec spec = minimal_spec();
    spec.steps = {StepCard{1, "First step.", "", ""}, StepCard{2, "Second step.", "", ""}};
    // Illustration fails only for step 2.
    f->registry->script_outcomes("IllustrationGeneration",
                                 {ToolOutcome{true, "ok", 0.1, 0.0},
                                  ToolOutcome{false, "render farm down", 0.1, 0.0}});
    BookletSpec gathered = gather_assets(spec, *f->registry, out_dir);
    CHECK(gathered.steps[0].illustration_ref.rfind("assets/", 0) == 0);
    CHECK(gathered.steps[1].illustration_ref == "placeholder:missing-illustration");

    std::string html = render_html(gathered);
    check_five_sections_in_order(html);
    CHECK(html.find("class=\"placeholder\"") != std::string::npos);
}

TEST_CASE("gather_assets with zero steps is a contract violation") {
    auto f = make_fixture("", BookletConfig{});
    BookletSpec spec = minimal_spec();
    spec.steps.clear();
    CHECK_THROWS_AS(gather_assets(spec, *f->registry, test_tmp_dir("booklet_zero")),
                    std::invalid_argument);
}

TEST_CASE("diver scenario passes at round 2 with a complete bundle") {
    BookletConfig config;
    config.max_rounds = 5;
    config.tau = 70;
    auto f = make_fixture("booklet_diver.json", config);
    auto out_dir = test_tmp_dir("booklet_diver");

    auto [spec, trace] = f->builder->build("cartesian diver", out_dir);

    REQUIRE(trace.size() == 2);
    CHECK(spec.verdict.pass);
    CHECK(spec.verdict.relevance == 90);
    CHECK(spec.grounded);
    CHECK(trace[0].confidence.value == 55);  // lowest of the four first-round scores
    CHECK(trace[1].confidence.value == 78);

    // Materials came from the entity recognizer: three items.
    REQUIRE(spec.materials.size() == 3);
    CHECK(spec.materials[0].name == "plastic bottle");

    // The second-round draft is the one that sticks.
    REQUIRE(spec.steps.size() == 3);
    CHECK(spec.safety.size() == 2);
    CHECK(spec.safety[0].severity == Severity::danger);

    // Bundle on disk: booklet.html plus resolvable asset references.
    std::string html = read_file(out_dir / "booklet.html");
    check_five_sections_in_order(html);
    for (const auto& material : spec.materials) {
        CHECK(std::filesystem::exists(out_dir / material.image_ref));
        CHECK(html.find("href=\"" + material.purchase_link + "\"") != std::string::npos);
    }
}

TEST_CASE("max_rounds=1 with a failing verdict flags the spec") {
    BookletConfig config;
    config.max_rounds = 1;
    config.tau = 70;
    auto f = make_fixture("booklet_diver.json", config);
    auto out_dir = test_tmp_dir("booklet_failing");

    auto [spec, trace] = f->builder->build("cartesian diver", out_dir);
    CHECK(trace.size() == 1);
    CHECK_FALSE(spec.verdict.pass);
    CHECK(spec.verdict.instructional_quality == 55);
}

TEST_CASE("a run where every retrieval fails is flagged ungrounded") {
    BookletConfig config;
    config.max_rounds = 1;
    config.tau = 70;
    auto f = make_fixture("booklet_diver.json", config);
    // Cycle 1 executes ProcedureSearch, SafetyAlert, EntityRecognition.
    ToolOutcome down{false, "service unavailable", 0.1, 0.0};
    f->registry->script_outcomes("ProcedureSearch", {down});
    f->registry->script_outcomes("SafetyAlert", {down});
    f->registry->script_outcomes("EntityRecognition", {down});

    auto [spec, trace] = f->builder->build("cartesian diver", test_tmp_dir("booklet_dark"));
    CHECK_FALSE(spec.grounded);
    CHECK_FALSE(spec.verdict.pass);
    // The draft text still arrived from the planner side.
    CHECK_FALSE(spec.steps.empty());
    for (const auto& outcome : trace[0].result.step_outcomes) {
        CHECK_FALSE(outcome.success);
    }
}

TEST_CASE("booklet builder rejects an empty topic") {
    auto f = make_fixture("", BookletConfig{});
    CHECK_THROWS_AS(f->builder->build("  ", test_tmp_dir("booklet_bad")),
                    std::invalid_argument);
}
