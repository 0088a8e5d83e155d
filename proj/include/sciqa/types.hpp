#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sciqa {

// Domain types for the Plan-Do-Study-Act loop. All of these are plain
// values; a run owns its own copies and never shares mutable state.

struct Query {
    std::string text;
    bool wants_booklet = false;
};

struct VideoSource {
    std::string path;
    double sample_fps = 1.0;
    // Textual description of the video; filled by the caption pass in cycle 1.
    std::string description;
};

enum class PlanOrigin { fresh, adjusted, carried };
const char* plan_origin_name(PlanOrigin origin);

struct PlanStep {
    std::string tool_name;
    std::string input;  // free text, or a JSON parameter object serialized to text
};

// One numbered candidate solution inside the per-cycle pool.
struct CandidatePlan {
    int number = 0;
    std::string description;
    std::vector<PlanStep> steps;
    PlanOrigin origin = PlanOrigin::fresh;
};

struct SolutionPool {
    int cycle_index = 1;
    std::vector<CandidatePlan> plans;

    const CandidatePlan* find(int number) const;
};

enum class KnowledgeSource { rag, study, execution };
const char* knowledge_source_name(KnowledgeSource source);

struct KnowledgeItem {
    KnowledgeSource source;
    std::string text;
    int cycle_added = 0;
};

// Accumulated knowledge. Append-only: items present at cycle i stay, in
// order, at every later cycle.
struct KnowledgeState {
    std::vector<KnowledgeItem> items;

    void append(KnowledgeSource source, std::string text, int cycle);
    bool empty() const { return items.empty(); }
    // Rendering used inside prompts.
    std::string to_prompt_block() const;
};

struct StepOutcome {
    std::string tool_name;
    bool success = false;
    std::string output;
    double elapsed_s = 0.0;
    double cost_usd = 0.0;
};

struct ExecutionResult {
    int plan_number = 0;
    std::vector<StepOutcome> step_outcomes;  // one per plan step, in order
    std::string synthesized_text;
};

struct ConfidenceScore {
    int value = 0;  // 0..100
    std::string rationale;
};

struct FailureAnalysis {
    std::string text;
    std::string knowledge_summary;
};

struct RunConfig {
    int max_rounds = 5;
    int tau = 70;  // confidence threshold
    double lambda_percep = 1.0;
    int pool_cap = 8;

    void validate() const;
};

struct FinalAnswer {
    std::string text;
    ConfidenceScore confidence;
    int cycles_used = 0;
    bool forced = false;  // true when max_rounds ran out before the threshold
};

// Throws std::invalid_argument when a domain invariant is broken.
void validate(const Query& q);
void validate(const VideoSource& v);

}  // namespace sciqa
