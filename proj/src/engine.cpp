#include "sciqa/engine.hpp"

#include "sciqa/json_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sciqa {

// ---------------------------------------------------------------------------
// Trace serialization: one JSON object per cycle, stable key order.
// ---------------------------------------------------------------------------

static nlohmann::json plan_to_json(const CandidatePlan& plan) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& step : plan.steps) {
        steps.push_back({{"tool", step.tool_name}, {"input", step.input}});
    }
    return {{"number", plan.number},
            {"description", plan.description},
            {"origin", plan_origin_name(plan.origin)},
            {"steps", steps}};
}

nlohmann::json cycle_record_to_json(const CycleRecord& record) {
    nlohmann::json pool = nlohmann::json::array();
    for (const auto& plan : record.pool.plans) pool.push_back(plan_to_json(plan));

    nlohmann::json scores = nlohmann::json::array();
    for (const auto& score : record.scores) {
        scores.push_back({{"plan", score.plan_number},
                          {"objective", score.objective},
                          {"perceptual", score.perceptual},
                          {"composite", score.composite},
                          {"detail", score.detail}});
    }

    nlohmann::json steps = nlohmann::json::array();
    for (const auto& outcome : record.result.step_outcomes) {
        steps.push_back({{"tool", outcome.tool_name},
                         {"success", outcome.success},
                         {"output", outcome.output},
                         {"elapsed_s", outcome.elapsed_s},
                         {"cost_usd", outcome.cost_usd}});
    }

    nlohmann::json knowledge = nlohmann::json::array();
    for (const auto& item : record.knowledge) {
        knowledge.push_back({{"source", knowledge_source_name(item.source)},
                             {"text", item.text},
                             {"cycle_added", item.cycle_added}});
    }

    nlohmann::json calls = nlohmann::json::array();
    for (const auto& call : record.backend_calls) {
        calls.push_back({{"role", call.role},
                         {"elapsed_s", call.elapsed_s},
                         {"cost_usd", call.cost_usd}});
    }

    nlohmann::json j = {
        {"cycle", record.cycle_index},
        {"pool", pool},
        {"scores", scores},
        {"chosen_plan", record.chosen_plan},
        {"result",
         {{"plan", record.result.plan_number},
          {"steps", steps},
          {"answer", record.result.synthesized_text}}},
        {"confidence", {{"value", record.confidence.value},
                        {"rationale", record.confidence.rationale}}},
        {"knowledge", knowledge},
        {"backend_calls", calls},
        {"totals", {{"elapsed_s", record.total_elapsed_s},
                    {"cost_usd", record.total_cost_usd}}},
    };
    if (record.failure) {
        j["failure"] = {{"text", record.failure->text},
                        {"knowledge_summary", record.failure->knowledge_summary}};
    }
    return j;
}

std::string trace_to_jsonl(const std::vector<CycleRecord>& trace) {
    std::ostringstream out;
    for (const auto& record : trace) out << cycle_record_to_json(record).dump() << "\n";
    return out.str();
}

void write_trace(const std::filesystem::path& path, const std::vector<CycleRecord>& trace) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trace: " + path.string());
    out << trace_to_jsonl(trace);
}

std::pair<double, double> usage_totals(const std::vector<CycleRecord>& trace) {
    double seconds = 0.0, cost = 0.0;
    for (const auto& record : trace) {
        for (const auto& call : record.backend_calls) {
            seconds += call.elapsed_s;
            cost += call.cost_usd;
        }
        for (const auto& outcome : record.result.step_outcomes) {
            seconds += outcome.elapsed_s;
            cost += outcome.cost_usd;
        }
    }
    return {seconds, cost};
}

static void finalize_record(CycleRecord& record, const KnowledgeState& knowledge) {
    record.knowledge = knowledge.items;
    double seconds = 0.0, cost = 0.0;
    for (const auto& call : record.backend_calls) {
        seconds += call.elapsed_s;
        cost += call.cost_usd;
    }
    for (const auto& outcome : record.result.step_outcomes) {
        seconds += outcome.elapsed_s;
        cost += outcome.cost_usd;
    }
    record.total_elapsed_s = seconds;
    record.total_cost_usd = cost;
}

// ---------------------------------------------------------------------------
// Plan parsing
// ---------------------------------------------------------------------------

static std::optional<CandidatePlan> parse_plan_item(const nlohmann::json& item) {
    if (!item.is_object()) return std::nullopt;
    CandidatePlan plan;
    if (item.contains("Number") && item["Number"].is_number()) {
        plan.number = item["Number"].get<int>();
    } else if (item.contains("number") && item["number"].is_number()) {
        plan.number = item["number"].get<int>();
    }
    plan.description = item.value("description", "");
    if (!item.contains("steps") || !item["steps"].is_array()) return std::nullopt;
    for (const auto& raw_step : item["steps"]) {
        if (!raw_step.is_object() || !raw_step.contains("tool")) continue;
        PlanStep step;
        step.tool_name = raw_step["tool"].get<std::string>();
        if (raw_step.contains("input")) {
            step.input = raw_step["input"].is_string() ? raw_step["input"].get<std::string>()
                                                       : raw_step["input"].dump();
        }
        plan.steps.push_back(std::move(step));
    }
    if (plan.steps.empty()) return std::nullopt;
    return plan;
}

std::vector<CandidatePlan> parse_plan_array(const nlohmann::json& array) {
    std::vector<CandidatePlan> plans;
    if (!array.is_array()) return plans;
    int position = 0;
    for (const auto& item : array) {
        ++position;
        auto plan = parse_plan_item(item);
        if (!plan) continue;
        if (plan->number < 1) plan->number = position;
        plans.push_back(std::move(*plan));
    }
    return plans;
}

std::vector<CandidatePlan> parse_plan_reply(const std::string& reply) {
    auto array = first_json_array(reply);
    if (!array) return {};
    return parse_plan_array(*array);
}

std::vector<CandidatePlan> validate_plans_against(std::vector<CandidatePlan> plans,
                                                  const ToolRegistry& registry) {
    std::vector<CandidatePlan> valid;
    for (auto& plan : plans) {
        if (plan.steps.empty()) continue;
        bool ok = true;
        for (auto& step : plan.steps) {
            if (!registry.has(step.tool_name)) {
                ok = false;
                break;
            }
            step.tool_name = registry.canonical_name(step.tool_name);
        }
        if (ok) valid.push_back(std::move(plan));
    }
    return valid;
}

SolutionPool sanitize_pool(SolutionPool pool, int cycle_index, int pool_cap,
                           const ExecutedSet& executed) {
    pool.cycle_index = cycle_index;
    // Plans already executed in earlier cycles never reappear.
    std::erase_if(pool.plans, [&](const CandidatePlan& p) {
        return executed.count({p.number, p.description}) > 0;
    });
    // Duplicate numbers force a sequential renumbering, order preserved.
    std::set<int> numbers;
    bool duplicates = false;
    for (const auto& p : pool.plans) {
        if (!numbers.insert(p.number).second) duplicates = true;
    }
    if (duplicates) {
        int next = 1;
        for (auto& p : pool.plans) p.number = next++;
    }
    if (pool_cap > 0 && static_cast<int>(pool.plans.size()) > pool_cap) {
        pool.plans.resize(static_cast<size_t>(pool_cap));
    }
    return pool;
}

SolutionPool replan_pool(const SolutionPool& old_pool, int executed_plan,
                         std::vector<CandidatePlan> validated_new, const ExecutedSet& executed,
                         int pool_cap, const std::string& fallback_input) {
    std::vector<CandidatePlan> carried;
    int max_number = executed_plan;
    for (const auto& plan : old_pool.plans) {
        max_number = std::max(max_number, plan.number);
        if (plan.number == executed_plan) continue;
        CandidatePlan kept = plan;
        kept.origin = PlanOrigin::carried;
        carried.push_back(std::move(kept));
    }

    std::vector<CandidatePlan> incoming;
    for (auto& plan : validated_new) {
        if (executed.count({plan.number, plan.description})) continue;
        auto replaces = std::find_if(carried.begin(), carried.end(),
                                     [&](const CandidatePlan& c) {
                                         return c.number == plan.number;
                                     });
        if (replaces != carried.end()) {
            plan.origin = PlanOrigin::adjusted;
            carried.erase(replaces);
        } else {
            plan.origin = PlanOrigin::fresh;
        }
        incoming.push_back(std::move(plan));
    }

    SolutionPool next;
    next.plans = std::move(incoming);  // fresh/adjusted first, then carried in original order
    next.plans.insert(next.plans.end(), carried.begin(), carried.end());

    if (next.plans.empty()) {
        // Keep the loop alive with a direct re-examination of the video.
        CandidatePlan fallback;
        fallback.number = max_number + 1;
        fallback.description = "Fallback: re-examine the video for the original question";
        fallback.steps.push_back(PlanStep{"VideoProcessor", fallback_input});
        fallback.origin = PlanOrigin::fresh;
        next.plans.push_back(std::move(fallback));
    }
    return sanitize_pool(std::move(next), old_pool.cycle_index + 1, pool_cap, executed);
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

Engine::Engine(EngineDeps deps, RunConfig config)
    : deps_(std::move(deps)), config_(config) {
    config_.validate();
    if (!deps_.gateway) throw std::invalid_argument("engine requires a backend gateway");
    if (!deps_.registry) throw std::invalid_argument("engine requires a tool registry");
}

IdfFn Engine::idf_fn() const {
    if (deps_.corpus) {
        const Corpus* corpus = deps_.corpus;
        return [corpus](const std::string& k) { return idf(k, *corpus); };
    }
    return [](const std::string&) { return 0.0; };
}

ChatResponse Engine::tracked_complete(const ChatRequest& request, CycleRecord* record) {
    ChatResponse response = deps_.gateway->complete(request);
    if (record) {
        record->backend_calls.push_back(
            BackendCallUsage{role_name(request.role), response.elapsed_s, response.cost_usd});
    }
    return response;
}

static std::string tool_catalogue(const ToolRegistry& registry, ToolCategory category) {
    std::ostringstream out;
    for (const auto& name : registry.tool_names()) {
        const auto& descriptor = registry.lookup(name);
        if (descriptor.category != category) continue;
        out << "- " << name << ": " << descriptor.input_schema << "\n";
    }
    return out.str();
}

static std::string plan_pool_prompt(const Query& query, const VideoSource& video,
                                    const KnowledgeState& knowledge,
                                    const ToolRegistry& registry) {
    std::ostringstream prompt;
    prompt << "Plan how to answer a question about a science video using the tools below. "
              "Propose several alternative plans; each plan lists the tool calls to make, in "
              "order, with concrete inputs.\n"
           << "Question: " << query.text << "\n"
           << "Video description: " << (video.description.empty() ? "(none yet)"
                                                                  : video.description)
           << "\nKnown facts:\n" << knowledge.to_prompt_block()
           << "\nTools:\n" << tool_catalogue(registry, ToolCategory::understanding)
           << "Reply with only a JSON array of plans, each "
              "{\"Number\": int, \"description\": str, \"steps\": "
              "[{\"tool\": str, \"input\": str}]}.";
    return prompt.str();
}

SolutionPool Engine::plan_stage(const Query& query, VideoSource& video,
                                KnowledgeState& knowledge, int cycle_index,
                                std::optional<SolutionPool> replanned, CycleRecord* record) {
    if (replanned) {
        return sanitize_pool(std::move(*replanned), cycle_index, config_.pool_cap, executed_);
    }
    if (cycle_index > 1) {
        throw std::invalid_argument("cycles after the first take their pool from act_stage");
    }
    validate(query);
    validate(video);

    // Caption the video once, at the configured sampling rate.
    nlohmann::json caption_input = {
        {"video", video.path}, {"fps", video.sample_fps}, {"focus", query.text}};
    ToolOutcome caption = deps_.registry->invoke("VideoProcessor", caption_input.dump());
    if (record) {
        record->backend_calls.push_back(
            BackendCallUsage{"captioner", caption.elapsed_s, caption.cost_usd});
    }
    video.description = caption.success ? caption.output
                                        : "(captioning failed: " + caption.output + ")";

    // One-time knowledge retrieval.
    std::vector<RetrievalHit> hits;
    if (deps_.corpus && deps_.store && !deps_.store->empty()) {
        Embedder embedder = deps_.embedder ? deps_.embedder : gateway_embedder(deps_.gateway);
        hits = retrieve_top_k(query.text + " " + video.description, deps_.retrieval_k,
                              *deps_.store, embedder);
    }
    std::string summary(kNoRelevantKnowledge);
    if (deps_.corpus && !hits.empty()) {
        ChatResponse raw;
        raw.elapsed_s = -1.0;
        summary = rag_summarize(query.text, hits, *deps_.corpus, *deps_.gateway, &raw);
        if (record && raw.elapsed_s >= 0.0) {
            record->backend_calls.push_back(
                BackendCallUsage{"planner", raw.elapsed_s, raw.cost_usd});
        }
    }
    knowledge.append(KnowledgeSource::rag, summary, cycle_index);

    // Ask the planner for the candidate pool; one repair round on failure.
    ChatRequest request;
    request.role = Role::planner;
    request.prompt = plan_pool_prompt(query, video, knowledge, *deps_.registry);
    std::vector<CandidatePlan> plans;
    for (int attempt = 0; attempt < 2; ++attempt) {
        ChatResponse response = tracked_complete(request, record);
        plans = validate_plans_against(parse_plan_reply(response.text), *deps_.registry);
        if (!plans.empty()) break;
        request.prompt = plan_pool_prompt(query, video, knowledge, *deps_.registry) +
                         "\nYour previous reply contained no valid plans. Output only the JSON "
                         "array, using only the listed tool names.";
    }
    SolutionPool pool;
    pool.plans = std::move(plans);
    for (auto& plan : pool.plans) plan.origin = PlanOrigin::fresh;
    return sanitize_pool(std::move(pool), cycle_index, config_.pool_cap, executed_);
}

static std::string synthesis_prompt(const Query& query, const VideoSource& video,
                                    const KnowledgeState& knowledge,
                                    const ExecutionResult& result) {
    std::ostringstream prompt;
    prompt << "Answer the question about the video using the evidence gathered below. Be "
              "specific and state the scientific principle involved.\n"
           << "Question: " << query.text << "\nVideo description: " << video.description
           << "\nKnown facts:\n" << knowledge.to_prompt_block() << "\nTool results:\n";
    for (const auto& outcome : result.step_outcomes) {
        prompt << "- " << outcome.tool_name << (outcome.success ? " (ok): " : " (failed): ")
               << outcome.output << "\n";
    }
    return prompt.str();
}

static std::optional<ConfidenceScore> parse_confidence(const std::string& reply) {
    auto obj = first_json_object(reply);
    if (obj && obj->contains("confidence") && (*obj)["confidence"].is_number()) {
        ConfidenceScore score;
        score.value = std::clamp(static_cast<int>(std::lround(
                                     (*obj)["confidence"].get<double>())), 0, 100);
        score.rationale = obj->value("rationale", trim(reply));
        return score;
    }
    auto number = first_number(reply);
    if (number) {
        ConfidenceScore score;
        score.value = std::clamp(static_cast<int>(std::lround(*number)), 0, 100);
        score.rationale = trim(reply);
        return score;
    }
    return std::nullopt;
}

std::pair<ExecutionResult, ConfidenceScore> Engine::do_stage(const SolutionPool& pool,
                                                             const VideoSource& video,
                                                             const KnowledgeState& knowledge,
                                                             const Query& query,
                                                             CycleRecord* record) {
    if (pool.plans.empty()) {
        throw std::invalid_argument("do_stage requires a non-empty pool");
    }

    std::vector<ChatResponse> judge_calls;
    std::vector<PlanScore> scores =
        score_pool(pool, deps_.profiles, idf_fn(), query, knowledge, *deps_.gateway,
                   config_.lambda_percep, video.sample_fps, &judge_calls);
    if (record) {
        for (const auto& call : judge_calls) {
            record->backend_calls.push_back(
                BackendCallUsage{"evaluator", call.elapsed_s, call.cost_usd});
        }
    }
    const CandidatePlan& chosen = select_best(pool, scores, config_.lambda_percep);
    executed_.insert({chosen.number, chosen.description});

    ExecutionResult result;
    result.plan_number = chosen.number;
    for (const auto& step : chosen.steps) {
        StepOutcome outcome;
        outcome.tool_name = step.tool_name;
        try {
            ToolOutcome raw = deps_.registry->invoke(step.tool_name, step.input);
            outcome.success = raw.success;
            outcome.output = raw.output;
            outcome.elapsed_s = raw.elapsed_s;
            outcome.cost_usd = raw.cost_usd;
        } catch (const ScenarioMissError&) {
            throw;  // fixture bug; surface it
        } catch (const TransportError&) {
            throw;
        } catch (const std::exception& e) {
            outcome.success = false;
            outcome.output = e.what();
        }
        // Failures are recorded and execution continues; deciding what a
        // failure means is the Study stage's job.
        result.step_outcomes.push_back(std::move(outcome));
    }

    ChatRequest synth;
    synth.role = Role::planner;
    synth.prompt = synthesis_prompt(query, video, knowledge, result);
    result.synthesized_text = tracked_complete(synth, record).text;

    ChatRequest conf;
    conf.role = Role::planner;
    conf.prompt = "How confident are you that this answer settles the question? Reply with an "
                  "integer from 0 to 100 and a one-line reason.\nQuestion: " + query.text +
                  "\nAnswer: " + result.synthesized_text;
    std::optional<ConfidenceScore> confidence;
    for (int attempt = 0; attempt < 2 && !confidence; ++attempt) {
        ChatResponse response = tracked_complete(conf, record);
        confidence = parse_confidence(response.text);
        if (!confidence) {
            conf.prompt += "\nReply with just the integer.";
        }
    }
    if (!confidence) confidence = ConfidenceScore{0, "unparseable confidence reply"};

    if (record) {
        record->scores = scores;
        record->chosen_plan = chosen.number;
        record->result = result;
        record->confidence = *confidence;
    }
    return {result, *confidence};
}

static std::string study_prompt(const Query& query, const VideoSource& video,
                                const KnowledgeState& knowledge,
                                const ExecutionResult& result) {
    std::ostringstream prompt;
    prompt << "The last attempt did not answer the question confidently. Explain what went "
              "wrong, summarize anything useful that was learned, and propose new or adjusted "
              "plans (an empty list is acceptable).\n"
           << "Question: " << query.text << "\nVideo description: " << video.description
           << "\nKnown facts:\n" << knowledge.to_prompt_block()
           << "\nExecuted plan " << result.plan_number << " results:\n";
    for (const auto& outcome : result.step_outcomes) {
        prompt << "- " << outcome.tool_name << (outcome.success ? " (ok): " : " (failed): ")
               << outcome.output << "\n";
    }
    prompt << "Candidate answer: " << result.synthesized_text
           << "\nReply with one JSON object: {\"failure_analysis\": str, "
              "\"knowledge_summary\": str, \"new_plans\": [same schema as the plan list]}.";
    return prompt.str();
}

Engine::StudyOutput Engine::study_stage(const ExecutionResult& result,
                                        KnowledgeState& knowledge, const Query& query,
                                        const VideoSource& video, int cycle_index,
                                        CycleRecord* record) {
    ChatRequest request;
    request.role = Role::study;
    request.prompt = study_prompt(query, video, knowledge, result);

    std::optional<nlohmann::json> parsed;
    for (int attempt = 0; attempt < 2 && !parsed; ++attempt) {
        ChatResponse response = tracked_complete(request, record);
        parsed = first_json_object(response.text);
        if (!parsed) {
            request.prompt += "\nYour previous reply could not be parsed. Output only the JSON "
                              "object.";
        }
    }

    StudyOutput output;
    if (!parsed) {
        // Degrade to an empty analysis; the knowledge state is untouched.
        return output;
    }
    output.analysis.text = parsed->value("failure_analysis", "");
    output.analysis.knowledge_summary = parsed->value("knowledge_summary", "");

    if (!output.analysis.knowledge_summary.empty()) {
        knowledge.append(KnowledgeSource::study, output.analysis.knowledge_summary, cycle_index);
    }
    for (const auto& outcome : result.step_outcomes) {
        if (outcome.success && !outcome.output.empty()) {
            knowledge.append(KnowledgeSource::execution,
                             outcome.tool_name + ": " + outcome.output, cycle_index);
        }
    }

    if (parsed->contains("new_plans") && (*parsed)["new_plans"].is_array()) {
        int position = 0;
        for (const auto& item : (*parsed)["new_plans"]) {
            ++position;
            auto plan = parse_plan_item(item);
            if (!plan) continue;
            if (plan->number < 1) plan->number = position;
            output.raw_new_plans.push_back(std::move(*plan));
        }
    }
    return output;
}

SolutionPool Engine::act_stage(const FailureAnalysis& failure, const KnowledgeState& knowledge,
                               const SolutionPool& old_pool, int executed_plan,
                               std::vector<CandidatePlan> raw_new_plans) {
    (void)failure;
    (void)knowledge;  // both already shaped the study reply the new plans came from
    std::string fallback_input = current_query_.empty()
                                     ? std::string("re-describe the key events in the video")
                                     : current_query_;
    return replan_pool(old_pool, executed_plan,
                       validate_plans_against(std::move(raw_new_plans), *deps_.registry),
                       executed_, config_.pool_cap, fallback_input);
}

std::pair<FinalAnswer, std::vector<CycleRecord>> Engine::run(const Query& query,
                                                             VideoSource video) {
    validate(query);
    validate(video);
    config_.validate();
    executed_.clear();
    current_query_ = query.text;

    KnowledgeState knowledge;
    std::vector<CycleRecord> trace;
    std::optional<SolutionPool> pending;
    FinalAnswer answer;

    try {
        for (int cycle = 1; cycle <= config_.max_rounds; ++cycle) {
            deps_.gateway->set_cycle(cycle);
            CycleRecord record;
            record.cycle_index = cycle;

            SolutionPool pool = plan_stage(query, video, knowledge, cycle, std::move(pending),
                                           &record);
            pending.reset();
            record.pool = pool;

            if (pool.plans.empty()) {
                record.result.synthesized_text = "planning failed: no valid plans this cycle";
                record.confidence = ConfidenceScore{0, "no plans were available to execute"};
            } else {
                do_stage(pool, video, knowledge, query, &record);
            }

            bool passed = record.confidence.value >= config_.tau;
            if (!passed && cycle < config_.max_rounds) {
                StudyOutput study = study_stage(record.result, knowledge, query, video, cycle,
                                                &record);
                record.failure = study.analysis;
                pending = act_stage(study.analysis, knowledge, pool, record.chosen_plan,
                                    std::move(study.raw_new_plans));
            } else if (!passed) {
                // Budget exhausted: force the most likely answer out of the
                // accumulated knowledge.
                ChatRequest forced;
                forced.role = Role::planner;
                forced.prompt = "No reasoning cycles remain. Based on the accumulated knowledge "
                                "below, give the most likely correct answer to the question.\n"
                                "Question: " + query.text + "\nVideo description: " +
                                video.description + "\nKnown facts:\n" +
                                knowledge.to_prompt_block() + "\nLast candidate answer: " +
                                record.result.synthesized_text;
                answer.text = tracked_complete(forced, &record).text;
                answer.forced = true;
            }

            finalize_record(record, knowledge);
            trace.push_back(record);

            if (passed) {
                answer.text = record.result.synthesized_text;
                answer.confidence = record.confidence;
                answer.cycles_used = cycle;
                answer.forced = false;
                return {answer, trace};
            }
        }
    } catch (const TransportError& e) {
        throw RunAbortedError(std::string("backend unreachable: ") + e.what(), trace);
    }

    answer.confidence = trace.back().confidence;
    answer.cycles_used = config_.max_rounds;
    answer.forced = true;
    if (answer.text.empty()) answer.text = trace.back().result.synthesized_text;
    return {answer, trace};
}

}  // namespace sciqa
