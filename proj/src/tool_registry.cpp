#include "sciqa/tool_registry.hpp"

#include "sciqa/json_util.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

namespace sciqa {

const char* tool_category_name(ToolCategory category) {
    switch (category) {
        case ToolCategory::understanding: return "understanding";
        case ToolCategory::booklet: return "booklet";
        case ToolCategory::fixed: return "fixed";
    }
    return "?";
}

CostProfile assumed_profile() {
    CostProfile p;
    p.mean_latency_s = 30.0;
    p.mean_cost_usd = 0.01;
    p.success_prob = 0.8;
    p.sample_count = 0;
    p.assumed = true;
    return p;
}

void ToolRegistry::register_tool(ToolDescriptor descriptor, ToolImpl impl) {
    const std::string name = descriptor.name;
    if (tools_.count(name) || aliases_.count(name)) {
        throw std::invalid_argument("tool already registered: " + name);
    }
    for (const auto& alias : descriptor.aliases) {
        if (tools_.count(alias) || aliases_.count(alias)) {
            throw std::invalid_argument("tool alias conflicts with existing name: " + alias);
        }
    }
    for (const auto& alias : descriptor.aliases) aliases_[alias] = name;
    order_.push_back(name);
    tools_[name] = Entry{std::move(descriptor), std::move(impl), {}};
}

std::string ToolRegistry::canonical_name(const std::string& name) const {
    if (tools_.count(name)) return name;
    auto it = aliases_.find(name);
    if (it != aliases_.end()) return it->second;
    throw std::out_of_range("unknown tool: " + name);
}

bool ToolRegistry::has(const std::string& name) const {
    return tools_.count(name) > 0 || aliases_.count(name) > 0;
}

const ToolDescriptor& ToolRegistry::lookup(const std::string& name) const {
    return entry(name).descriptor;
}

std::vector<std::string> ToolRegistry::tool_names() const {
    return order_;
}

ToolRegistry::Entry& ToolRegistry::entry(const std::string& name) {
    return tools_.at(canonical_name(name));
}

const ToolRegistry::Entry& ToolRegistry::entry(const std::string& name) const {
    return tools_.at(canonical_name(name));
}

void ToolRegistry::script_outcomes(const std::string& name, std::vector<ToolOutcome> outcomes) {
    auto& e = entry(name);
    for (auto& o : outcomes) e.scripted.push_back(std::move(o));
}

ToolOutcome ToolRegistry::invoke(const std::string& name, const std::string& input,
                                 bool profile_clock) {
    auto& e = entry(name);
    const int attempts = 1 + std::max(0, e.descriptor.retries);
    double elapsed_total = 0.0;
    double cost_total = 0.0;
    ToolOutcome last;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        ToolOutcome outcome;
        auto start = std::chrono::steady_clock::now();
        if (!e.scripted.empty()) {
            outcome = e.scripted.front();
            e.scripted.pop_front();
        } else {
            outcome = e.impl(input);
        }
        if (profile_clock && outcome.elapsed_s == 0.0) {
            outcome.elapsed_s = std::chrono::duration<double>(
                std::chrono::steady_clock::now() - start).count();
        }
        elapsed_total += outcome.elapsed_s;
        cost_total += outcome.cost_usd;
        last = outcome;
        if (outcome.elapsed_s > e.descriptor.timeout_s) {
            last.success = false;
            last.output = "timeout after " + std::to_string(outcome.elapsed_s) + " s";
            continue;  // retry
        }
        break;
    }
    last.elapsed_s = elapsed_total;
    last.cost_usd = cost_total;
    return last;
}

// ---------------------------------------------------------------------------
// Built-in tools. VideoProcessor is backed by the captioner role of the
// backend; the remaining adapters are deterministic offline stubs whose
// real counterparts (search services, SR/illustration/speech models) sit
// outside this artifact.
// ---------------------------------------------------------------------------

namespace {

ToolImpl require_input(std::string tool, ToolImpl impl) {
    return [tool = std::move(tool), impl = std::move(impl)](const std::string& input) {
        if (trim(input).empty()) {
            throw std::invalid_argument(tool + ": input must be non-empty");
        }
        return impl(input);
    };
}

ToolImpl canned_stub(std::string prefix, double elapsed_s, double cost_usd) {
    return [prefix = std::move(prefix), elapsed_s, cost_usd](const std::string& input) {
        ToolOutcome o;
        o.success = true;
        o.output = prefix + input;
        o.elapsed_s = elapsed_s;
        o.cost_usd = cost_usd;
        return o;
    };
}

}  // namespace

ToolRegistry register_builtin_tools(std::shared_ptr<Gateway> backend) {
    ToolRegistry registry;

    auto video_processor = [backend](const std::string& input) {
        ChatRequest request;
        request.role = Role::captioner;
        request.prompt = "Describe the video content requested below, frame by frame, in plain "
                         "text.\n" + input;
        ChatResponse response = backend->complete(request);
        ToolOutcome o;
        o.success = true;
        o.output = response.text;
        o.elapsed_s = response.elapsed_s;
        o.cost_usd = response.cost_usd;
        return o;
    };

    registry.register_tool(
        ToolDescriptor{"WebSearch", {}, ToolCategory::understanding,
                       "query sentence", 60.0, 1},
        require_input("WebSearch", canned_stub("web results: ", 0.02, 0.0005)));
    registry.register_tool(
        ToolDescriptor{"PaperSearch", {}, ToolCategory::understanding,
                       "query sentence", 60.0, 1},
        require_input("PaperSearch", canned_stub("paper results: ", 0.02, 0.0004)));
    registry.register_tool(
        ToolDescriptor{"VideoProcessor", {"Captioner"}, ToolCategory::understanding,
                       "video path, segments, fps, and what to look for", 120.0, 1},
        require_input("VideoProcessor", video_processor));
    registry.register_tool(
        ToolDescriptor{"VideoSR", {}, ToolCategory::understanding,
                       "same parameters as VideoProcessor; frames are upscaled first", 180.0, 0},
        [](const std::string& input) {
            ToolOutcome o;
            o.success = true;
            o.output = "upscaled: " + input;
            o.elapsed_s = 0.05;
            o.cost_usd = 0.0001;
            return o;
        });
    registry.register_tool(
        ToolDescriptor{"ProcedureSearch", {}, ToolCategory::booklet,
                       "experiment name or description", 60.0, 1},
        require_input("ProcedureSearch", canned_stub("procedure: ", 0.03, 0.0006)));
    registry.register_tool(
        ToolDescriptor{"EntityRecognition", {}, ToolCategory::booklet,
                       "procedure text to extract instruments/materials from", 60.0, 0},
        require_input("EntityRecognition", [](const std::string&) {
            // Offline stand-in: a fixed delimited list in the agent's
            // output format.
            ToolOutcome o;
            o.success = true;
            o.output = "plastic bottle; water; dropper";
            o.elapsed_s = 0.01;
            o.cost_usd = 0.0002;
            return o;
        }));
    registry.register_tool(
        ToolDescriptor{"SafetyAlert", {}, ToolCategory::booklet,
                       "experiment content and equipment", 60.0, 1},
        require_input("SafetyAlert", canned_stub("safety: ", 0.02, 0.0005)));
    registry.register_tool(
        ToolDescriptor{"EquipmentSearch", {}, ToolCategory::fixed,
                       "equipment item name", 60.0, 1},
        require_input("EquipmentSearch", [](const std::string& input) {
            std::string slug;
            for (char c : input) {
                if (std::isalnum(static_cast<unsigned char>(c))) {
                    slug.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
                } else if (!slug.empty() && slug.back() != '-') {
                    slug.push_back('-');
                }
            }
            while (!slug.empty() && slug.back() == '-') slug.pop_back();
            ToolOutcome o;
            o.success = true;
            o.output = "image=equip_" + slug + ".svg link=https://shop.example/item/" + slug;
            o.elapsed_s = 0.02;
            o.cost_usd = 0.0003;
            return o;
        }));
    registry.register_tool(
        ToolDescriptor{"IllustrationGeneration", {}, ToolCategory::fixed,
                       "step description to illustrate", 120.0, 0},
        require_input("IllustrationGeneration", canned_stub("illustration: ", 0.04, 0.001)));
    registry.register_tool(
        ToolDescriptor{"SpeechGeneration", {}, ToolCategory::fixed,
                       "text to narrate", 120.0, 0},
        require_input("SpeechGeneration", canned_stub("speech: ", 0.03, 0.0002)));

    return registry;
}

// ---------------------------------------------------------------------------
// Profiling
// ---------------------------------------------------------------------------

std::function<std::string(int)> seeded_probe_inputs(uint64_t seed) {
    static const std::vector<std::string> templates = {
        "why does the liquid change color",
        "how fast does the ball fall",
        "what reaction produces the gas",
        "which force moves the object",
        "what happens when the flame touches the metal",
        "how does the pressure change inside the bottle",
        "why does the solid float in the solution",
        "what makes the light bend in the water",
    };
    return [seed](int i) {
        // splitmix64 over (seed, i), stable across platforms
        uint64_t z = seed + 0x9e3779b97f4a7c15ull * static_cast<uint64_t>(i + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z = z ^ (z >> 31);
        const std::string& base = templates[z % templates.size()];
        return base + " (probe " + std::to_string(i + 1) + ")";
    };
}

CostProfile profile_tool(ToolRegistry& registry, const std::string& name, int probes,
                         const std::function<std::string(int)>& probe_inputs) {
    if (probes < 1) throw std::invalid_argument("profile_tool requires probes >= 1");
    double latency_sum = 0.0;
    double cost_sum = 0.0;
    int successes = 0;
    int completed = 0;
    for (int i = 0; i < probes; ++i) {
        try {
            ToolOutcome outcome = registry.invoke(name, probe_inputs(i), true);
            latency_sum += outcome.elapsed_s;
            cost_sum += outcome.cost_usd;
            ++completed;
            if (outcome.success) ++successes;
        } catch (const std::exception&) {
            // A throwing probe counts as a failed call with nothing to average.
        }
    }
    CostProfile profile;
    profile.mean_latency_s = completed ? latency_sum / completed : 0.0;
    profile.mean_cost_usd = completed ? cost_sum / completed : 0.0;
    profile.success_prob = static_cast<double>(successes) / probes;
    profile.sample_count = probes;
    profile.assumed = false;
    return profile;
}

CostProfile profile_tool(ToolRegistry& registry, const std::string& name, int probes,
                         uint64_t seed) {
    CostProfile profile = profile_tool(registry, name, probes, seeded_probe_inputs(seed));
    profile.probe_seed = seed;
    return profile;
}

// ---------------------------------------------------------------------------
// Plan cost estimation
// ---------------------------------------------------------------------------

static bool fps_scaled(const std::string& canonical) {
    return canonical == "VideoProcessor" || canonical == "VideoSR";
}

PlanCostEstimate estimate_plan_cost(const CandidatePlan& plan, const ProfileMap& profiles,
                                    double sample_fps) {
    PlanCostEstimate estimate;
    for (const auto& step : plan.steps) {
        auto it = profiles.find(step.tool_name);
        CostProfile profile = it != profiles.end() ? it->second : assumed_profile();
        double scale = fps_scaled(step.tool_name) ? sample_fps : 1.0;
        estimate.latency_s += profile.mean_latency_s * scale;
        estimate.cost_usd += profile.mean_cost_usd * scale;
        estimate.success_prob *= profile.success_prob;
    }
    return estimate;
}

ProfileMap load_profile_store(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open profile store: " + path.string());
    nlohmann::json j;
    in >> j;
    ProfileMap profiles;
    for (auto it = j.begin(); it != j.end(); ++it) {
        CostProfile p;
        p.mean_latency_s = it.value().value("mean_latency_s", 0.0);
        p.mean_cost_usd = it.value().value("mean_cost_usd", 0.0);
        p.success_prob = it.value().value("success_prob", 0.0);
        p.sample_count = it.value().value("sample_count", 0);
        p.assumed = it.value().value("assumed", false);
        p.probe_seed = it.value().value("probe_seed", uint64_t{0});
        profiles[it.key()] = p;
    }
    return profiles;
}

void save_profile_store(const std::filesystem::path& path, const ProfileMap& profiles) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, p] : profiles) {
        nlohmann::json entry = {
            {"mean_latency_s", p.mean_latency_s},
            {"mean_cost_usd", p.mean_cost_usd},
            {"success_prob", p.success_prob},
            {"sample_count", p.sample_count},
        };
        if (p.assumed) entry["assumed"] = true;
        if (p.probe_seed != 0) entry["probe_seed"] = p.probe_seed;
        j[name] = entry;
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write profile store: " + path.string());
    out << j.dump(2) << "\n";
}

}  // namespace sciqa
