#pragma once

#include "sciqa/engine.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace sciqa {

// Query-only PDSA loop over booklet content, followed by asset gathering
// and assembly of a five-section self-contained HTML e-booklet.

struct MaterialItem {
    std::string name;
    std::string image_ref;      // relative path inside the bundle, or "placeholder:..."
    std::string purchase_link;
};

struct StepCard {
    int ordinal = 0;  // contiguous from 1
    std::string instruction;
    std::string illustration_ref;
    std::string narration_ref;
};

enum class Severity { info, caution, danger };
const char* severity_name(Severity severity);
Severity severity_from_name(const std::string& name);

struct SafetyNote {
    std::string text;
    Severity severity = Severity::info;
    std::string audio_ref;
};

// Per-component quality gate; pass requires every component >= tau.
struct QualityVerdict {
    int relevance = 0;
    int instructional_quality = 0;
    int attractiveness = 0;
    int educational_value = 0;
    bool pass = false;

    int lowest() const;
};

struct BookletSpec {
    std::string topic;
    std::string principle;
    std::string intro;
    std::vector<MaterialItem> materials;
    std::vector<StepCard> steps;
    std::vector<SafetyNote> safety;
    std::string summary;
    QualityVerdict verdict;
    bool grounded = true;  // false when the content came from no successful retrieval
};

nlohmann::json booklet_spec_to_json(const BookletSpec& spec);
BookletSpec booklet_spec_from_json(const nlohmann::json& j);

// Splits a delimited entity reply ("beaker; vinegar; baking soda") into a
// deduplicated, order-preserving list.
std::vector<std::string> parse_entity_list(const std::string& reply);

// Asks the entity-recognition agent for the instruments/materials named in
// the procedure text. Parse failure degrades to an empty list.
std::vector<std::string> extract_entities(const std::string& procedure_text,
                                          ToolRegistry& registry);

// Fetches per-item assets into <out_dir>/assets and rewrites the spec's
// references: equipment image + purchase link per material, illustration +
// narration per step, audio per safety note. A failed fetch leaves a typed
// placeholder reference; the layout still renders. Throws when the spec
// has no steps.
BookletSpec gather_assets(BookletSpec spec, ToolRegistry& registry,
                          const std::filesystem::path& out_dir);

// One self-contained HTML document with exactly five sections, in order:
// intro, materials, steps, safety, summary. Styling and the audio helper
// script are inline; the only external references are purchase links and
// sibling asset files. Deterministic in its input.
std::string render_html(const BookletSpec& spec);

struct BookletConfig {
    int max_rounds = 5;
    int tau = 70;  // per-component verdict threshold
    double lambda_percep = 1.0;
    int pool_cap = 8;
};

class BookletBuilder {
public:
    BookletBuilder(EngineDeps deps, BookletConfig config);

    // Runs the PDSA loop over booklet content (plans draw on the booklet
    // toolset; confidence is the four-component verdict), then gathers
    // assets into out_dir and writes out_dir/booklet.html.
    std::pair<BookletSpec, std::vector<CycleRecord>> build(const std::string& topic,
                                                           const std::filesystem::path& out_dir);

private:
    EngineDeps deps_;
    BookletConfig config_;
    ExecutedSet executed_;
};

}  // namespace sciqa
