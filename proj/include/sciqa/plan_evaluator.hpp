#pragma once

#include "sciqa/backend.hpp"
#include "sciqa/tool_registry.hpp"
#include "sciqa/types.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace sciqa {

// Do-stage plan scoring: a deterministic objective score built from the
// cost priors and keyword IDF, plus one comparative LLM judgment over the
// whole pool. Selection is the argmax of objective + lambda * perceptual.

struct PlanScore {
    int plan_number = 0;
    double objective = 0.0;   // in [0,1]
    double perceptual = 0.0;  // in [0,1]
    double composite = 0.0;   // objective + lambda * perceptual
    std::map<std::string, double> detail;  // raw components (cost, success_prob, idf_mean, ...)
};

// t + 1000c, the scalar that makes seconds and dollars comparable.
// Throws std::invalid_argument on negative input.
double combined_cost(double latency_s, double money_usd);

using IdfFn = std::function<double(const std::string&)>;

struct ObjectiveResult {
    double value = 0.0;
    std::map<std::string, double> detail;
};

// objective = 0.5 * feasibility + 0.5 * economy where
//   feasibility = (product of step success probabilities)
//                 * (min-max-normalized mean keyword IDF, within the pool)
//   economy     = 1 - min-max-normalized total combined cost (within the pool)
// Keywords come from the plan description plus step inputs. Pools of size
// one (or with no spread) normalize to 0.5. A step without a profile
// contributes success probability 0.5 and flags the detail map.
ObjectiveResult objective_score(const CandidatePlan& plan, const ProfileMap& profiles,
                                const IdfFn& idf_of, const SolutionPool& pool,
                                double sample_fps = 1.0);

// One comparative judge call over the whole pool; scores clamped to [0,1],
// plans missing from the reply default to 0.5. An unparseable reply is
// retried once, after which every plan gets 0.5 (objective-only ranking).
std::map<int, double> perceptual_score(const SolutionPool& pool, const Query& query,
                                       const KnowledgeState& knowledge, Gateway& gateway,
                                       std::vector<ChatResponse>* raw_calls = nullptr);

// Objective + perceptual for every plan in one pass.
std::vector<PlanScore> score_pool(const SolutionPool& pool, const ProfileMap& profiles,
                                  const IdfFn& idf_of, const Query& query,
                                  const KnowledgeState& knowledge, Gateway& gateway,
                                  double lambda_percep, double sample_fps = 1.0,
                                  std::vector<ChatResponse>* raw_calls = nullptr);

// Argmax of composite; exact ties go to the lowest plan number. Throws on
// an empty pool.
const CandidatePlan& select_best(const SolutionPool& pool, const std::vector<PlanScore>& scores,
                                 double lambda_percep);

}  // namespace sciqa
