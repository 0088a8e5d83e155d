#pragma once

#include "sciqa/backend.hpp"
#include "sciqa/knowledge_base.hpp"
#include "sciqa/plan_evaluator.hpp"
#include "sciqa/tool_registry.hpp"
#include "sciqa/types.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace sciqa {

// The Plan-Do-Study-Act loop driving a run from (query, video) to a final
// answer. One Engine instance handles one run at a time; separate runs use
// separate instances.

struct BackendCallUsage {
    std::string role;
    double elapsed_s = 0.0;
    double cost_usd = 0.0;
};

// Full trace of one PDSA iteration; serialized as one JSON object per line.
struct CycleRecord {
    int cycle_index = 0;
    SolutionPool pool;
    std::vector<PlanScore> scores;
    int chosen_plan = 0;
    ExecutionResult result;
    ConfidenceScore confidence;
    std::optional<FailureAnalysis> failure;
    std::vector<KnowledgeItem> knowledge;  // snapshot at end of cycle
    std::vector<BackendCallUsage> backend_calls;
    double total_elapsed_s = 0.0;
    double total_cost_usd = 0.0;
};

nlohmann::json cycle_record_to_json(const CycleRecord& record);
std::string trace_to_jsonl(const std::vector<CycleRecord>& trace);
void write_trace(const std::filesystem::path& path, const std::vector<CycleRecord>& trace);

// Sums elapsed seconds and currency over every backend call and tool
// outcome recorded in the trace.
std::pair<double, double> usage_totals(const std::vector<CycleRecord>& trace);

// Thrown when the backend becomes unreachable mid-run; carries whatever
// trace was completed so callers can persist it.
struct RunAbortedError : std::runtime_error {
    RunAbortedError(const std::string& what, std::vector<CycleRecord> trace)
        : std::runtime_error(what), partial_trace(std::move(trace)) {}
    std::vector<CycleRecord> partial_trace;
};

// Parses a planner reply into candidate plans: code fences stripped, first
// bracket-balanced array extracted, entries with missing pieces dropped.
std::vector<CandidatePlan> parse_plan_reply(const std::string& reply);
std::vector<CandidatePlan> parse_plan_array(const nlohmann::json& array);

using ExecutedSet = std::set<std::pair<int, std::string>>;  // (number, description)

// Drops plans whose steps are empty or name unregistered tools and
// rewrites step tool names to their canonical form.
std::vector<CandidatePlan> validate_plans_against(std::vector<CandidatePlan> plans,
                                                  const ToolRegistry& registry);

// Removes already-executed plans, renumbers sequentially when numbers
// collide (order preserved) and truncates to pool_cap.
SolutionPool sanitize_pool(SolutionPool pool, int cycle_index, int pool_cap,
                           const ExecutedSet& executed);

// The Act update: (old pool minus the executed plan) plus the validated new
// plans, fresh/adjusted first then carried in original order, truncated to
// pool_cap. An empty result is replaced by a single fallback plan (one
// VideoProcessor step) so the loop can continue.
SolutionPool replan_pool(const SolutionPool& old_pool, int executed_plan,
                         std::vector<CandidatePlan> validated_new, const ExecutedSet& executed,
                         int pool_cap, const std::string& fallback_input);

struct EngineDeps {
    std::shared_ptr<Gateway> gateway;
    ToolRegistry* registry = nullptr;
    ProfileMap profiles;
    const Corpus* corpus = nullptr;          // null -> no knowledge base
    const EmbeddingStore* store = nullptr;   // null -> retrieval disabled
    Embedder embedder;                       // defaults to gateway embeddings
    int retrieval_k = 3;
};

class Engine {
public:
    Engine(EngineDeps deps, RunConfig config);

    // Runs cycles until confidence reaches tau or max_rounds is exhausted
    // (in which case an answer is forced out of accumulated knowledge).
    std::pair<FinalAnswer, std::vector<CycleRecord>> run(const Query& query, VideoSource video);

    // Stage entry points. run() is a composition of these; tests drive them
    // directly.

    // Cycle 1 captions the video and performs the one-time knowledge
    // retrieval before asking the planner for a pool. Later cycles receive
    // the replanned pool from act_stage and only validate it.
    SolutionPool plan_stage(const Query& query, VideoSource& video, KnowledgeState& knowledge,
                            int cycle_index,
                            std::optional<SolutionPool> replanned = std::nullopt,
                            CycleRecord* record = nullptr);

    // Scores the pool, executes the selected plan step-by-step (failures
    // are recorded, later steps still run), synthesizes a candidate answer
    // and asks the planner for a confidence score.
    std::pair<ExecutionResult, ConfidenceScore> do_stage(const SolutionPool& pool,
                                                         const VideoSource& video,
                                                         const KnowledgeState& knowledge,
                                                         const Query& query,
                                                         CycleRecord* record = nullptr);

    struct StudyOutput {
        FailureAnalysis analysis;
        std::vector<CandidatePlan> raw_new_plans;
    };

    // Diagnoses the failed cycle and grows the knowledge state (union,
    // append-only). raw_new_plans may legally be empty.
    StudyOutput study_stage(const ExecutionResult& result, KnowledgeState& knowledge,
                            const Query& query, const VideoSource& video, int cycle_index,
                            CycleRecord* record = nullptr);

    // Builds the next pool: old pool minus the executed plan, plus the
    // validated new plans, truncated to pool_cap fresh-first. An empty
    // result is replaced by a single fallback plan so the loop continues.
    SolutionPool act_stage(const FailureAnalysis& failure, const KnowledgeState& knowledge,
                           const SolutionPool& old_pool, int executed_plan,
                           std::vector<CandidatePlan> raw_new_plans);

    const RunConfig& config() const { return config_; }

private:
    IdfFn idf_fn() const;
    ChatResponse tracked_complete(const ChatRequest& request, CycleRecord* record);

    EngineDeps deps_;
    RunConfig config_;
    ExecutedSet executed_;
    std::string current_query_;
};

}  // namespace sciqa
