#include "sciqa/types.hpp"

#include "sciqa/json_util.hpp"

#include <sstream>

namespace sciqa {

const char* plan_origin_name(PlanOrigin origin) {
    switch (origin) {
        case PlanOrigin::fresh: return "fresh";
        case PlanOrigin::adjusted: return "adjusted";
        case PlanOrigin::carried: return "carried";
    }
    return "?";
}

const char* knowledge_source_name(KnowledgeSource source) {
    switch (source) {
        case KnowledgeSource::rag: return "rag";
        case KnowledgeSource::study: return "study";
        case KnowledgeSource::execution: return "execution";
    }
    return "?";
}

const CandidatePlan* SolutionPool::find(int number) const {
    for (const auto& p : plans) {
        if (p.number == number) return &p;
    }
    return nullptr;
}

void KnowledgeState::append(KnowledgeSource source, std::string text, int cycle) {
    items.push_back(KnowledgeItem{source, std::move(text), cycle});
}

std::string KnowledgeState::to_prompt_block() const {
    if (items.empty()) return "(none)";
    std::ostringstream out;
    for (const auto& item : items) {
        out << "- [" << knowledge_source_name(item.source) << "] " << item.text << "\n";
    }
    return out.str();
}

void RunConfig::validate() const {
    if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
    if (tau < 0 || tau > 100) throw std::invalid_argument("tau must be in [0,100]");
    if (lambda_percep < 0) throw std::invalid_argument("lambda_percep must be >= 0");
    if (pool_cap < 1) throw std::invalid_argument("pool_cap must be >= 1");
}

void validate(const Query& q) {
    if (trim(q.text).empty()) throw std::invalid_argument("query text must be non-empty");
}

void validate(const VideoSource& v) {
    if (v.sample_fps <= 0) throw std::invalid_argument("sample_fps must be > 0");
}

}  // namespace sciqa
