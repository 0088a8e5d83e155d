#include "sciqa/plan_evaluator.hpp"

#include "sciqa/json_util.hpp"
#include "sciqa/knowledge_base.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>
#include <sstream>

namespace sciqa {

double combined_cost(double latency_s, double money_usd) {
    if (latency_s < 0 || money_usd < 0) {
        throw std::invalid_argument("combined_cost arguments must be non-negative");
    }
    return latency_s + 1000.0 * money_usd;
}

namespace {

// Raw per-plan ingredients, before any pool-relative normalization.
struct RawComponents {
    double cost = 0.0;          // total combined cost
    double success_prod = 1.0;  // product over steps, 0.5 for unknown tools
    double idf_mean = 0.0;      // mean IDF over unique keywords
    int unknown_tools = 0;
};

RawComponents raw_components(const CandidatePlan& plan, const ProfileMap& profiles,
                             const IdfFn& idf_of, double sample_fps) {
    RawComponents raw;
    PlanCostEstimate estimate = estimate_plan_cost(plan, profiles, sample_fps);
    raw.cost = combined_cost(estimate.latency_s, estimate.cost_usd);
    for (const auto& step : plan.steps) {
        auto it = profiles.find(step.tool_name);
        if (it == profiles.end()) {
            raw.success_prod *= 0.5;
            ++raw.unknown_tools;
        } else {
            raw.success_prod *= it->second.success_prob;
        }
    }
    std::ostringstream text;
    text << plan.description;
    for (const auto& step : plan.steps) text << ' ' << step.input;
    std::set<std::string> keywords;
    for (const auto& token : tokenize(text.str())) keywords.insert(token);
    if (!keywords.empty()) {
        double sum = 0.0;
        for (const auto& k : keywords) sum += idf_of(k);
        raw.idf_mean = sum / static_cast<double>(keywords.size());
    }
    return raw;
}

// Min-max over the pool. A single value, or no spread, maps to 0.5.
std::vector<double> minmax_normalize(const std::vector<double>& values) {
    std::vector<double> out(values.size(), 0.5);
    if (values.size() < 2) return out;
    auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it, hi = *hi_it;
    if (hi == lo) return out;
    for (size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) / (hi - lo);
    return out;
}

}  // namespace

ObjectiveResult objective_score(const CandidatePlan& plan, const ProfileMap& profiles,
                                const IdfFn& idf_of, const SolutionPool& pool,
                                double sample_fps) {
    std::vector<double> pool_costs, pool_idf_means;
    RawComponents own;
    bool found = false;
    for (const auto& rival : pool.plans) {
        RawComponents raw = raw_components(rival, profiles, idf_of, sample_fps);
        pool_costs.push_back(raw.cost);
        pool_idf_means.push_back(raw.idf_mean);
        if (rival.number == plan.number) {
            own = raw;
            found = true;
        }
    }
    if (!found) throw std::invalid_argument("plan is not part of the pool it is scored against");

    std::vector<double> cost_norm = minmax_normalize(pool_costs);
    std::vector<double> idf_norm = minmax_normalize(pool_idf_means);
    size_t index = 0;
    for (size_t i = 0; i < pool.plans.size(); ++i) {
        if (pool.plans[i].number == plan.number) index = i;
    }

    double feasibility = own.success_prod * idf_norm[index];
    double economy = 1.0 - cost_norm[index];
    ObjectiveResult result;
    result.value = 0.5 * feasibility + 0.5 * economy;
    result.detail["cost"] = own.cost;
    result.detail["success_prob"] = own.success_prod;
    result.detail["idf_mean"] = own.idf_mean;
    result.detail["idf_norm"] = idf_norm[index];
    result.detail["economy"] = economy;
    result.detail["feasibility"] = feasibility;
    if (own.unknown_tools > 0) result.detail["unknown_tools"] = own.unknown_tools;
    return result;
}

static std::string perceptual_prompt(const SolutionPool& pool, const Query& query,
                                     const KnowledgeState& knowledge) {
    std::ostringstream prompt;
    prompt << "Compare the candidate plans below on coverage of the question, logical "
              "coherence, scientific soundness, and clarity. Score each plan between 0 and 1.\n"
           << "Question: " << query.text << "\nKnown facts:\n" << knowledge.to_prompt_block()
           << "\nPlans:\n";
    for (const auto& plan : pool.plans) {
        prompt << plan.number << ". " << plan.description << " [steps:";
        for (const auto& step : plan.steps) prompt << ' ' << step.tool_name;
        prompt << "]\n";
    }
    prompt << "Reply with one JSON object mapping plan number to score, e.g. "
              "{\"1\": 0.8, \"2\": 0.4}. No other text.";
    return prompt.str();
}

static std::map<int, double> parse_perceptual(const std::string& reply,
                                              const SolutionPool& pool, bool* ok) {
    std::map<int, double> scores;
    *ok = false;
    auto obj = first_json_object(reply);
    if (!obj || !obj->is_object()) return scores;
    for (auto it = obj->begin(); it != obj->end(); ++it) {
        int number = 0;
        try {
            number = std::stoi(it.key());
        } catch (const std::exception&) {
            continue;
        }
        if (!it.value().is_number()) continue;
        double v = it.value().get<double>();
        scores[number] = std::clamp(v, 0.0, 1.0);
    }
    if (scores.empty()) return scores;
    *ok = true;
    // Plans the judge skipped default to the midpoint.
    for (const auto& plan : pool.plans) {
        if (!scores.count(plan.number)) scores[plan.number] = 0.5;
    }
    return scores;
}

std::map<int, double> perceptual_score(const SolutionPool& pool, const Query& query,
                                       const KnowledgeState& knowledge, Gateway& gateway,
                                       std::vector<ChatResponse>* raw_calls) {
    ChatRequest request;
    request.role = Role::evaluator;
    request.prompt = perceptual_prompt(pool, query, knowledge);

    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string reply;
        try {
            ChatResponse response = gateway.complete(request);
            if (raw_calls) raw_calls->push_back(response);
            reply = response.text;
        } catch (const std::exception& e) {
            std::cerr << "warning: perceptual judge call failed: " << e.what() << "\n";
            break;
        }
        bool ok = false;
        auto scores = parse_perceptual(reply, pool, &ok);
        if (ok) return scores;
        request.prompt = perceptual_prompt(pool, query, knowledge) +
                         "\nYour previous reply could not be parsed. Output only the JSON object.";
    }
    // Objective-only ranking: everything at the midpoint.
    std::map<int, double> fallback;
    for (const auto& plan : pool.plans) fallback[plan.number] = 0.5;
    return fallback;
}

std::vector<PlanScore> score_pool(const SolutionPool& pool, const ProfileMap& profiles,
                                  const IdfFn& idf_of, const Query& query,
                                  const KnowledgeState& knowledge, Gateway& gateway,
                                  double lambda_percep, double sample_fps,
                                  std::vector<ChatResponse>* raw_calls) {
    auto perceptual = perceptual_score(pool, query, knowledge, gateway, raw_calls);
    std::vector<PlanScore> scores;
    scores.reserve(pool.plans.size());
    for (const auto& plan : pool.plans) {
        ObjectiveResult objective = objective_score(plan, profiles, idf_of, pool, sample_fps);
        PlanScore score;
        score.plan_number = plan.number;
        score.objective = objective.value;
        score.perceptual = perceptual.at(plan.number);
        score.composite = score.objective + lambda_percep * score.perceptual;
        score.detail = std::move(objective.detail);
        scores.push_back(std::move(score));
    }
    return scores;
}

const CandidatePlan& select_best(const SolutionPool& pool, const std::vector<PlanScore>& scores,
                                 double lambda_percep) {
    if (pool.plans.empty()) throw std::invalid_argument("select_best requires a non-empty pool");
    const CandidatePlan* best = nullptr;
    double best_composite = 0.0;
    for (const auto& plan : pool.plans) {
        const PlanScore* score = nullptr;
        for (const auto& s : scores) {
            if (s.plan_number == plan.number) score = &s;
        }
        if (!score) {
            throw std::invalid_argument("missing score for plan " + std::to_string(plan.number));
        }
        double composite = score->objective + lambda_percep * score->perceptual;
        if (!best || composite > best_composite ||
            (composite == best_composite && plan.number < best->number)) {
            best = &plan;
            best_composite = composite;
        }
    }
    return *best;
}

}  // namespace sciqa
