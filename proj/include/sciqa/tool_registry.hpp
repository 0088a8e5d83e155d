#pragma once

#include "sciqa/backend.hpp"
#include "sciqa/types.hpp"

#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace sciqa {

// Registers every dispatchable tool/agent behind one invocation interface,
// holds their empirical cost priors, and executes plan steps.

enum class ToolCategory { understanding, booklet, fixed };
const char* tool_category_name(ToolCategory category);

struct ToolDescriptor {
    std::string name;  // canonical
    std::vector<std::string> aliases;
    ToolCategory category = ToolCategory::understanding;
    std::string input_schema;  // human-readable description of the expected input
    double timeout_s = 60.0;
    int retries = 0;  // extra attempts after a timeout
};

struct ToolOutcome {
    bool success = false;
    std::string output;
    double elapsed_s = 0.0;
    double cost_usd = 0.0;
};

using ToolImpl = std::function<ToolOutcome(const std::string& input)>;

// Per-tool empirical prior measured by probe calls; "assumed" profiles are
// placeholders for tools that were never probed.
struct CostProfile {
    double mean_latency_s = 0.0;
    double mean_cost_usd = 0.0;
    double success_prob = 0.0;
    int sample_count = 0;
    bool assumed = false;
    uint64_t probe_seed = 0;  // recorded when locally profiled
};

using ProfileMap = std::map<std::string, CostProfile>;

// Placeholder prior for unprofiled tools so the loop never stalls on a
// missing entry: 30 s, $0.01, 0.8 success, flagged assumed.
CostProfile assumed_profile();

class ToolRegistry {
public:
    // Throws on duplicate canonical names or conflicting aliases.
    void register_tool(ToolDescriptor descriptor, ToolImpl impl);

    bool has(const std::string& name) const;
    // Resolves aliases; throws std::out_of_range when unknown.
    const ToolDescriptor& lookup(const std::string& name) const;
    std::string canonical_name(const std::string& name) const;
    std::vector<std::string> tool_names() const;  // canonical, registration order

    // Executes one tool call: resolves the alias, applies the descriptor's
    // timeout/retry policy, and reports elapsed time and cost from the
    // backing implementation's accounting. An attempt whose reported
    // elapsed time exceeds the timeout counts as a timeout and is retried.
    ToolOutcome invoke(const std::string& name, const std::string& input,
                       bool profile_clock = false);

    // Queues canned outcomes consumed by subsequent invocations, ahead of
    // the registered implementation. Lets tests script failures/timeouts.
    void script_outcomes(const std::string& name, std::vector<ToolOutcome> outcomes);

private:
    struct Entry {
        ToolDescriptor descriptor;
        ToolImpl impl;
        std::deque<ToolOutcome> scripted;
    };
    Entry& entry(const std::string& name);
    const Entry& entry(const std::string& name) const;

    std::vector<std::string> order_;
    std::map<std::string, Entry> tools_;          // canonical -> entry
    std::map<std::string, std::string> aliases_;  // alias -> canonical
};

// Registers the built-in toolset: WebSearch, PaperSearch, VideoProcessor
// (alias Captioner), VideoSR, ProcedureSearch, EntityRecognition,
// SafetyAlert, EquipmentSearch, IllustrationGeneration, SpeechGeneration.
// VideoProcessor routes through the backend captioner role; the rest are
// deterministic offline stubs (the models behind them are not part of this
// artifact).
ToolRegistry register_builtin_tools(std::shared_ptr<Gateway> backend);

// Issues `probes` randomized probe calls and aggregates the outcomes.
// probe_inputs(i) supplies the i-th probe input.
CostProfile profile_tool(ToolRegistry& registry, const std::string& name, int probes,
                         const std::function<std::string(int)>& probe_inputs);

// Deterministic probe input generator seeded from config (templated query
// phrases; the seed is recorded in the resulting profile).
std::function<std::string(int)> seeded_probe_inputs(uint64_t seed);
CostProfile profile_tool(ToolRegistry& registry, const std::string& name, int probes,
                         uint64_t seed);

struct PlanCostEstimate {
    double latency_s = 0.0;
    double cost_usd = 0.0;
    double success_prob = 1.0;
};

// Sums latency/cost over steps and multiplies success probabilities.
// Frame-rate-scaled tools (VideoProcessor, VideoSR) scale linearly with
// sample_fps. Missing profiles fall back to assumed_profile().
PlanCostEstimate estimate_plan_cost(const CandidatePlan& plan, const ProfileMap& profiles,
                                    double sample_fps = 1.0);

// Profile store file: JSON object mapping tool name -> profile with keys
// mean_latency_s, mean_cost_usd, success_prob, sample_count.
ProfileMap load_profile_store(const std::filesystem::path& path);
void save_profile_store(const std::filesystem::path& path, const ProfileMap& profiles);

}  // namespace sciqa
