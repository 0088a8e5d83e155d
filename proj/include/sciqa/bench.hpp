#pragma once

#include "sciqa/backend.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sciqa {

// Benchmark loading, discrete relevance/accuracy judging, comparative
// education judging, and report tables.

enum class Category { physics, chemistry, daily_life };
const char* category_name(Category category);
Category category_from_name(const std::string& name);

enum class QType { terminology, principle, prediction, reading, design };
const char* qtype_name(QType qtype);
QType qtype_from_name(const std::string& name);

struct QAPair {
    std::string id;
    Category category = Category::physics;
    QType qtype = QType::terminology;
    std::string video;
    std::string question;
    std::string reference;   // expert reference answer
    std::string background;  // supporting scientific background
};

// JSON Lines, one record per line with fields id, category, qtype, video,
// question, reference, background. A malformed record raises an error
// naming its id (or line number when the id itself is missing).
std::vector<QAPair> load_benchmark(const std::filesystem::path& path);

enum class Metric { relevance, accuracy };
const char* metric_name(Metric metric);

// Scores live on the discrete rubric {0, 0.5, 1}; enforced on parse.
struct JudgeVerdict {
    Metric metric = Metric::relevance;
    double score = 0.0;
    std::string raw_reply;
};

// Builds the rubric prompt from the reference answer, background and
// candidate, and parses the single-number reply. An off-rubric reply is
// re-asked once, then mapped to the nearest member of {0, 0.5, 1} (ties
// toward the lower value). Backend failures propagate so the caller can
// exclude the pair.
JudgeVerdict judge_answer(Metric metric, const QAPair& qa, const std::string& candidate,
                          Gateway& judge);

struct CategorizedScore {
    Category category = Category::physics;
    Metric metric = Metric::relevance;
    double score = 0.0;
};

struct ScoreRow {
    double relevance_pct = 0.0;  // mean * 100, rounded to 2 decimals
    double accuracy_pct = 0.0;
    int count = 0;  // verdict pairs in this category
};

struct ScoreTable {
    std::map<Category, ScoreRow> rows;  // empty categories are omitted
};

ScoreTable aggregate_scores(const std::vector<CategorizedScore>& verdicts);

// One markdown / CSV row per system; the single-system overloads cover the
// common case of scoring this engine's own answers.
std::string render_markdown(const ScoreTable& table, const std::string& system_name);
std::string render_csv(const ScoreTable& table, const std::string& system_name);

// The four comparative aspects, in report order.
const std::vector<std::string>& education_aspects();

// Winner per aspect; aspects the judge could not settle are absent (void).
struct EducationVerdict {
    std::map<std::string, std::string> winner_by_aspect;
};

// One comparative judge call over all systems' responses. Model names are
// replaced by stable pseudonyms before judging and mapped back after; a
// winner name that matches no pseudonym is re-asked once, then the aspect
// is void. Requires at least two responses.
EducationVerdict education_compare(const std::map<std::string, std::string>& responses_by_model,
                                   const std::string& context, Gateway& judge);

// Per-aspect win rate (%) per model over non-void verdicts. Aspects with
// no usable verdicts are omitted.
using WinRateTable = std::map<std::string, std::map<std::string, double>>;
WinRateTable win_rates(const std::vector<EducationVerdict>& verdicts,
                       const std::vector<std::string>& models);

// One row per model, one column per aspect.
std::string render_win_rates_markdown(const WinRateTable& rates,
                                      const std::vector<std::string>& models);
std::string render_win_rates_csv(const WinRateTable& rates,
                                 const std::vector<std::string>& models);

}  // namespace sciqa
