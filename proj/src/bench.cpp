#include "sciqa/bench.hpp"

#include "sciqa/json_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sciqa {

const char* category_name(Category category) {
    switch (category) {
        case Category::physics: return "physics";
        case Category::chemistry: return "chemistry";
        case Category::daily_life: return "daily_life";
    }
    return "?";
}

Category category_from_name(const std::string& name) {
    if (name == "physics") return Category::physics;
    if (name == "chemistry") return Category::chemistry;
    if (name == "daily_life") return Category::daily_life;
    throw std::invalid_argument("unknown category: " + name);
}

const char* qtype_name(QType qtype) {
    switch (qtype) {
        case QType::terminology: return "terminology";
        case QType::principle: return "principle";
        case QType::prediction: return "prediction";
        case QType::reading: return "reading";
        case QType::design: return "design";
    }
    return "?";
}

QType qtype_from_name(const std::string& name) {
    if (name == "terminology") return QType::terminology;
    if (name == "principle") return QType::principle;
    if (name == "prediction") return QType::prediction;
    if (name == "reading") return QType::reading;
    if (name == "design") return QType::design;
    throw std::invalid_argument("unknown question type: " + name);
}

const char* metric_name(Metric metric) {
    return metric == Metric::relevance ? "relevance" : "accuracy";
}

std::vector<QAPair> load_benchmark(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open benchmark file: " + path.string());
    std::vector<QAPair> pairs;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw std::runtime_error("benchmark line " + std::to_string(line_number) +
                                     " is not valid JSON");
        }
        QAPair qa;
        qa.id = j.value("id", "");
        std::string where = qa.id.empty() ? "line " + std::to_string(line_number)
                                          : "record " + qa.id;
        auto require = [&](const char* field) {
            std::string value = j.value(field, "");
            if (trim(value).empty()) {
                throw std::runtime_error("benchmark " + where + ": missing field '" + field +
                                         "'");
            }
            return value;
        };
        require("id");
        try {
            qa.category = category_from_name(require("category"));
            qa.qtype = qtype_from_name(require("qtype"));
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error("benchmark " + where + ": " + e.what());
        }
        qa.video = require("video");
        qa.question = require("question");
        qa.reference = require("reference");
        qa.background = require("background");
        pairs.push_back(std::move(qa));
    }
    return pairs;
}

// ---------------------------------------------------------------------------
// Discrete relevance/accuracy judging
// ---------------------------------------------------------------------------

static std::string rubric_prompt(Metric metric, const QAPair& qa, const std::string& candidate) {
    std::ostringstream prompt;
    if (metric == Metric::relevance) {
        prompt << "Grade how relevant the candidate answer is to the question's scientific "
                  "subtopic, regardless of correctness. Score 1 when it is entirely on the "
                  "question's specific subtopic, 0.5 when it is partly off-topic or only "
                  "broadly related, 0 when it is irrelevant.\n";
    } else {
        prompt << "Grade the correctness of the candidate answer against the reference. Score "
                  "0 when it contradicts the reference on any fact or number. Score 1 when it "
                  "covers every key point of the reference with no such errors (extra correct "
                  "detail is fine). Score 0.5 when it covers only some key points and contains "
                  "no absolute errors.\n";
    }
    prompt << "Question: " << qa.question << "\nReference answer: " << qa.reference
           << "\nBackground: " << qa.background << "\nCandidate answer: " << candidate
           << "\nReply with the number only: 0, 0.5 or 1.";
    return prompt.str();
}

static bool on_rubric(double v) {
    return std::abs(v) < 1e-9 || std::abs(v - 0.5) < 1e-9 || std::abs(v - 1.0) < 1e-9;
}

static double nearest_member(double v) {
    // Ties go to the lower member.
    static const double members[] = {0.0, 0.5, 1.0};
    double best = 0.0;
    double best_distance = std::abs(v - 0.0);
    for (double m : members) {
        double d = std::abs(v - m);
        if (d < best_distance) {
            best = m;
            best_distance = d;
        }
    }
    return best;
}

JudgeVerdict judge_answer(Metric metric, const QAPair& qa, const std::string& candidate,
                          Gateway& judge) {
    ChatRequest request;
    request.role = Role::judge;
    request.prompt = rubric_prompt(metric, qa, candidate);

    JudgeVerdict verdict;
    verdict.metric = metric;
    std::optional<double> last_value;
    for (int attempt = 0; attempt < 2; ++attempt) {
        ChatResponse response = judge.complete(request);
        verdict.raw_reply = response.text;
        last_value = first_number(response.text);
        if (last_value && on_rubric(*last_value)) {
            verdict.score = nearest_member(*last_value);
            return verdict;
        }
        request.prompt += "\nReply with exactly one of: 0, 0.5, 1.";
    }
    verdict.score = last_value ? nearest_member(*last_value) : 0.0;
    return verdict;
}

// ---------------------------------------------------------------------------
// Aggregation & report rendering
// ---------------------------------------------------------------------------

static double mean_pct(double sum, int count) {
    if (count == 0) return 0.0;
    // Sum first, then scale: keeps halves exact before the final division.
    double pct = sum * 100.0 / count;
    return std::round(pct * 100.0) / 100.0;
}

ScoreTable aggregate_scores(const std::vector<CategorizedScore>& verdicts) {
    struct Accumulator {
        double rel_sum = 0.0;
        int rel_count = 0;
        double acc_sum = 0.0;
        int acc_count = 0;
    };
    std::map<Category, Accumulator> acc;
    for (const auto& v : verdicts) {
        auto& a = acc[v.category];
        if (v.metric == Metric::relevance) {
            a.rel_sum += v.score;
            ++a.rel_count;
        } else {
            a.acc_sum += v.score;
            ++a.acc_count;
        }
    }
    ScoreTable table;
    for (const auto& [category, a] : acc) {
        if (a.rel_count == 0 && a.acc_count == 0) continue;
        ScoreRow row;
        row.relevance_pct = mean_pct(a.rel_sum, a.rel_count);
        row.accuracy_pct = mean_pct(a.acc_sum, a.acc_count);
        row.count = std::max(a.rel_count, a.acc_count);
        table.rows[category] = row;
    }
    return table;
}

static std::string format_pct(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", value);
    return buffer;
}

static std::string display_category(Category category) {
    switch (category) {
        case Category::physics: return "Physics";
        case Category::chemistry: return "Chemistry";
        case Category::daily_life: return "Daily Life";
    }
    return "?";
}

std::string render_markdown(const ScoreTable& table, const std::string& system_name) {
    std::ostringstream out;
    out << "## Understanding scores: " << system_name << "\n\n";
    out << "| Category | Rel | Acc | Count |\n";
    out << "|---|---|---|---|\n";
    for (const auto& [category, row] : table.rows) {
        out << "| " << display_category(category) << " | " << format_pct(row.relevance_pct)
            << " | " << format_pct(row.accuracy_pct) << " | " << row.count << " |\n";
    }
    return out.str();
}

std::string render_csv(const ScoreTable& table, const std::string& system_name) {
    std::ostringstream out;
    out << "system,category,rel,acc,count\n";
    for (const auto& [category, row] : table.rows) {
        out << system_name << ',' << category_name(category) << ','
            << format_pct(row.relevance_pct) << ',' << format_pct(row.accuracy_pct) << ','
            << row.count << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Comparative education judging
// ---------------------------------------------------------------------------

const std::vector<std::string>& education_aspects() {
    static const std::vector<std::string> aspects = {
        "Relevance", "Instructional Quality", "Attractiveness", "Educational Value"};
    return aspects;
}

EducationVerdict education_compare(const std::map<std::string, std::string>& responses_by_model,
                                   const std::string& context, Gateway& judge) {
    if (responses_by_model.size() < 2) {
        throw std::invalid_argument("education_compare needs at least two responses");
    }

    // Stable pseudonyms: models sorted by name become System A, B, C, ...
    std::vector<std::string> models;
    for (const auto& [model, _] : responses_by_model) models.push_back(model);
    std::sort(models.begin(), models.end());
    std::map<std::string, std::string> pseudonym_to_model;
    std::map<std::string, std::string> model_to_pseudonym;
    for (size_t i = 0; i < models.size(); ++i) {
        std::string pseudonym = "System " + std::string(1, static_cast<char>('A' + i));
        pseudonym_to_model[pseudonym] = models[i];
        model_to_pseudonym[models[i]] = pseudonym;
    }

    std::ostringstream prompt;
    prompt << "Several systems produced experimental procedures and precautions for the same "
              "scientific phenomenon. Using the background below, pick the single best system "
              "for each aspect: Relevance, Instructional Quality, Attractiveness, Educational "
              "Value.\nBackground: " << context << "\n";
    for (const auto& model : models) {
        prompt << "--- " << model_to_pseudonym[model] << " ---\n"
               << responses_by_model.at(model) << "\n";
    }
    prompt << "Reply with one JSON object: {\"Relevance\": system name, \"Instructional "
              "Quality\": system name, \"Attractiveness\": system name, \"Educational "
              "Value\": system name}.";

    EducationVerdict verdict;
    std::string request_prompt = prompt.str();
    for (int attempt = 0; attempt < 2; ++attempt) {
        ChatRequest request;
        request.role = Role::judge;
        request.prompt = request_prompt;
        std::string reply;
        try {
            reply = judge.complete(request).text;
        } catch (const std::exception&) {
            return EducationVerdict{};  // all aspects void
        }
        auto obj = first_json_object(reply);
        bool all_resolved = true;
        if (obj && obj->is_object()) {
            for (const auto& aspect : education_aspects()) {
                if (verdict.winner_by_aspect.count(aspect)) continue;
                std::string winner = obj->value(aspect, "");
                auto it = pseudonym_to_model.find(trim(winner));
                if (it != pseudonym_to_model.end()) {
                    verdict.winner_by_aspect[aspect] = it->second;
                } else {
                    all_resolved = false;
                }
            }
        } else {
            all_resolved = false;
        }
        if (all_resolved) break;
        request_prompt += "\nUse exactly the system names given above.";
    }
    return verdict;  // unresolved aspects stay void
}

WinRateTable win_rates(const std::vector<EducationVerdict>& verdicts,
                       const std::vector<std::string>& models) {
    if (verdicts.empty()) throw std::invalid_argument("win_rates requires verdicts");
    WinRateTable rates;
    for (const auto& aspect : education_aspects()) {
        int usable = 0;
        std::map<std::string, int> wins;
        for (const auto& verdict : verdicts) {
            auto it = verdict.winner_by_aspect.find(aspect);
            if (it == verdict.winner_by_aspect.end()) continue;
            ++usable;
            ++wins[it->second];
        }
        if (usable == 0) continue;  // aspect fully void
        for (const auto& model : models) {
            rates[aspect][model] = 100.0 * wins[model] / usable;
        }
    }
    return rates;
}

std::string render_win_rates_markdown(const WinRateTable& rates,
                                      const std::vector<std::string>& models) {
    std::ostringstream out;
    out << "## Education win rates\n\n| Model |";
    for (const auto& aspect : education_aspects()) out << ' ' << aspect << " |";
    out << "\n|---|";
    for (size_t i = 0; i < education_aspects().size(); ++i) out << "---|";
    out << "\n";
    for (const auto& model : models) {
        out << "| " << model << " |";
        for (const auto& aspect : education_aspects()) {
            auto it = rates.find(aspect);
            if (it == rates.end() || !it->second.count(model)) {
                out << " - |";
            } else {
                out << ' ' << format_pct(it->second.at(model)) << " |";
            }
        }
        out << "\n";
    }
    return out.str();
}

std::string render_win_rates_csv(const WinRateTable& rates,
                                 const std::vector<std::string>& models) {
    std::ostringstream out;
    out << "model";
    for (const auto& aspect : education_aspects()) out << ',' << aspect;
    out << "\n";
    for (const auto& model : models) {
        out << model;
        for (const auto& aspect : education_aspects()) {
            auto it = rates.find(aspect);
            if (it == rates.end() || !it->second.count(model)) {
                out << ",-";
            } else {
                out << ',' << format_pct(it->second.at(model));
            }
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace sciqa
