#include "sciqa/booklet.hpp"

#include "sciqa/json_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace sciqa {

namespace fs = std::filesystem;

const char* severity_name(Severity severity) {
    switch (severity) {
        case Severity::info: return "info";
        case Severity::caution: return "caution";
        case Severity::danger: return "danger";
    }
    return "?";
}

Severity severity_from_name(const std::string& name) {
    if (name == "danger") return Severity::danger;
    if (name == "caution") return Severity::caution;
    return Severity::info;
}

int QualityVerdict::lowest() const {
    return std::min({relevance, instructional_quality, attractiveness, educational_value});
}

// ---------------------------------------------------------------------------
// Spec (de)serialization, used for golden tests and the output bundle.
// ---------------------------------------------------------------------------

nlohmann::json booklet_spec_to_json(const BookletSpec& spec) {
    nlohmann::json materials = nlohmann::json::array();
    for (const auto& m : spec.materials) {
        materials.push_back({{"name", m.name},
                             {"image", m.image_ref},
                             {"link", m.purchase_link}});
    }
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : spec.steps) {
        steps.push_back({{"ordinal", s.ordinal},
                         {"instruction", s.instruction},
                         {"illustration", s.illustration_ref},
                         {"narration", s.narration_ref}});
    }
    nlohmann::json safety = nlohmann::json::array();
    for (const auto& n : spec.safety) {
        safety.push_back({{"text", n.text},
                          {"severity", severity_name(n.severity)},
                          {"audio", n.audio_ref}});
    }
    return {{"topic", spec.topic},
            {"principle", spec.principle},
            {"intro", spec.intro},
            {"materials", materials},
            {"steps", steps},
            {"safety", safety},
            {"summary", spec.summary},
            {"verdict",
             {{"relevance", spec.verdict.relevance},
              {"instructional_quality", spec.verdict.instructional_quality},
              {"attractiveness", spec.verdict.attractiveness},
              {"educational_value", spec.verdict.educational_value},
              {"pass", spec.verdict.pass}}},
            {"grounded", spec.grounded}};
}

BookletSpec booklet_spec_from_json(const nlohmann::json& j) {
    BookletSpec spec;
    spec.topic = j.value("topic", "");
    spec.principle = j.value("principle", "");
    spec.intro = j.value("intro", "");
    for (const auto& m : j.value("materials", nlohmann::json::array())) {
        spec.materials.push_back(MaterialItem{m.value("name", ""), m.value("image", ""),
                                              m.value("link", "")});
    }
    for (const auto& s : j.value("steps", nlohmann::json::array())) {
        spec.steps.push_back(StepCard{s.value("ordinal", 0), s.value("instruction", ""),
                                      s.value("illustration", ""), s.value("narration", "")});
    }
    for (const auto& n : j.value("safety", nlohmann::json::array())) {
        spec.safety.push_back(SafetyNote{n.value("text", ""),
                                         severity_from_name(n.value("severity", "info")),
                                         n.value("audio", "")});
    }
    spec.summary = j.value("summary", "");
    if (j.contains("verdict")) {
        const auto& v = j["verdict"];
        spec.verdict.relevance = v.value("relevance", 0);
        spec.verdict.instructional_quality = v.value("instructional_quality", 0);
        spec.verdict.attractiveness = v.value("attractiveness", 0);
        spec.verdict.educational_value = v.value("educational_value", 0);
        spec.verdict.pass = v.value("pass", false);
    }
    spec.grounded = j.value("grounded", true);
    return spec;
}

// ---------------------------------------------------------------------------
// Entity extraction
// ---------------------------------------------------------------------------

std::vector<std::string> parse_entity_list(const std::string& reply) {
    std::vector<std::string> entities;
    std::set<std::string> seen;
    std::string current;
    auto flush = [&] {
        std::string item = trim(current);
        current.clear();
        if (item.empty()) return;
        if (seen.insert(item).second) entities.push_back(item);
    };
    for (char c : reply) {
        if (c == ';' || c == ',' || c == '\n') {
            flush();
        } else {
            current.push_back(c);
        }
    }
    flush();
    return entities;
}

std::vector<std::string> extract_entities(const std::string& procedure_text,
                                          ToolRegistry& registry) {
    if (trim(procedure_text).empty()) {
        throw std::invalid_argument("extract_entities requires non-empty text");
    }
    try {
        ToolOutcome outcome = registry.invoke("EntityRecognition", procedure_text);
        if (!outcome.success) {
            std::cerr << "warning: entity recognition failed: " << outcome.output << "\n";
            return {};
        }
        auto entities = parse_entity_list(outcome.output);
        if (entities.empty()) {
            std::cerr << "warning: entity reply contained no entities\n";
        }
        return entities;
    } catch (const std::exception& e) {
        std::cerr << "warning: entity recognition error: " << e.what() << "\n";
        return {};
    }
}

// ---------------------------------------------------------------------------
// Asset gathering. The tool adapters report what exists; this writes the
// sibling files the booklet references.
// ---------------------------------------------------------------------------

static std::string html_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

static void write_svg_asset(const fs::path& path, const std::string& label) {
    std::ofstream out(path, std::ios::binary);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"320\" height=\"200\">"
        << "<rect width=\"320\" height=\"200\" fill=\"#eef6ff\" stroke=\"#88aadd\"/>"
        << "<text x=\"16\" y=\"104\" font-size=\"14\" fill=\"#224\">" << html_escape(label)
        << "</text></svg>\n";
}

static void write_wav_asset(const fs::path& path) {
    // Minimal 8-bit mono PCM file: header plus a short run of silence.
    static const unsigned char header[] = {
        'R', 'I', 'F', 'F', 60, 0, 0, 0, 'W', 'A', 'V', 'E',
        'f', 'm', 't', ' ', 16, 0, 0, 0, 1, 0, 1, 0,
        0x40, 0x1f, 0, 0, 0x40, 0x1f, 0, 0, 1, 0, 8, 0,
        'd', 'a', 't', 'a', 24, 0, 0, 0,
    };
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    for (int i = 0; i < 24; ++i) out.put(static_cast<char>(0x80));
}

static bool is_placeholder(const std::string& ref) {
    return ref.rfind("placeholder:", 0) == 0;
}

BookletSpec gather_assets(BookletSpec spec, ToolRegistry& registry, const fs::path& out_dir) {
    if (spec.steps.empty()) {
        throw std::invalid_argument("booklet spec has no steps; nothing to gather assets for");
    }
    fs::create_directories(out_dir / "assets");

    auto try_invoke = [&](const std::string& tool, const std::string& input) {
        try {
            return registry.invoke(tool, input);
        } catch (const std::exception& e) {
            ToolOutcome failed;
            failed.success = false;
            failed.output = e.what();
            return failed;
        }
    };

    for (auto& material : spec.materials) {
        ToolOutcome outcome = try_invoke("EquipmentSearch", material.name);
        std::string image_file, link;
        if (outcome.success) {
            std::istringstream fields(outcome.output);
            std::string field;
            while (fields >> field) {
                if (field.rfind("image=", 0) == 0) image_file = field.substr(6);
                if (field.rfind("link=", 0) == 0) link = field.substr(5);
            }
        }
        if (!image_file.empty()) {
            write_svg_asset(out_dir / "assets" / image_file, material.name);
            material.image_ref = "assets/" + image_file;
        } else {
            material.image_ref = "placeholder:missing-image";
        }
        material.purchase_link = link;
    }

    for (auto& step : spec.steps) {
        std::string stem = "step_" + std::to_string(step.ordinal);
        ToolOutcome illustration = try_invoke("IllustrationGeneration", step.instruction);
        if (illustration.success) {
            write_svg_asset(out_dir / "assets" / (stem + ".svg"), step.instruction);
            step.illustration_ref = "assets/" + stem + ".svg";
        } else {
            step.illustration_ref = "placeholder:missing-illustration";
        }
        ToolOutcome narration = try_invoke("SpeechGeneration", step.instruction);
        if (narration.success) {
            write_wav_asset(out_dir / "assets" / (stem + ".wav"));
            step.narration_ref = "assets/" + stem + ".wav";
        } else {
            step.narration_ref = "placeholder:missing-audio";
        }
    }

    int note_index = 0;
    for (auto& note : spec.safety) {
        ++note_index;
        ToolOutcome audio = try_invoke("SpeechGeneration", note.text);
        if (audio.success) {
            std::string file = "safety_" + std::to_string(note_index) + ".wav";
            write_wav_asset(out_dir / "assets" / file);
            note.audio_ref = "assets/" + file;
        } else {
            note.audio_ref = "placeholder:missing-audio";
        }
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

static const char* kBookletCss =
    "body{font-family:Georgia,serif;max-width:760px;margin:24px auto;padding:0 16px;"
    "background:#fffdf7;color:#222}\n"
    "section{margin-bottom:28px;padding:16px;border-radius:12px;background:#fff;"
    "box-shadow:0 1px 4px rgba(0,0,0,.12)}\n"
    "h1{color:#1a4d8f}h2{color:#2a6f2a;border-bottom:2px dotted #bbb;padding-bottom:4px}\n"
    ".principle{font-style:italic;color:#555}\n"
    ".materials li,.safety-list li{margin:10px 0}\n"
    "img{display:block;max-width:320px;border-radius:8px;margin:6px 0}\n"
    ".safety.info{border-left:6px solid #4a90d9;padding-left:10px}\n"
    ".safety.caution{border-left:6px solid #e6a817;padding-left:10px}\n"
    ".safety.danger{border-left:6px solid #d0342c;padding-left:10px;font-weight:bold}\n"
    ".placeholder{display:inline-block;padding:8px;background:#eee;color:#777;"
    "border:1px dashed #aaa;border-radius:6px}\n";

static const char* kBookletScript =
    "document.querySelectorAll('audio').forEach(function(a){"
    "a.addEventListener('play',function(){"
    "document.querySelectorAll('audio').forEach(function(b){if(b!==a)b.pause();});});});";

static void render_media(std::ostringstream& out, const std::string& ref,
                         const std::string& alt, bool audio) {
    if (ref.empty()) return;
    if (is_placeholder(ref)) {
        out << "<span class=\"placeholder\">" << html_escape(ref.substr(12)) << "</span>";
        return;
    }
    if (audio) {
        out << "<audio controls src=\"" << html_escape(ref) << "\"></audio>";
    } else {
        out << "<img src=\"" << html_escape(ref) << "\" alt=\"" << html_escape(alt) << "\">";
    }
}

std::string render_html(const BookletSpec& spec) {
    std::ostringstream out;
    out << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>"
        << html_escape(spec.topic) << "</title>\n<style>\n" << kBookletCss
        << "</style>\n</head>\n<body>\n";

    out << "<section id=\"intro\">\n<h1>" << html_escape(spec.topic) << "</h1>\n"
        << "<p class=\"principle\">" << html_escape(spec.principle) << "</p>\n<p>"
        << html_escape(spec.intro) << "</p>\n</section>\n";

    out << "<section id=\"materials\">\n<h2>What You Need</h2>\n<ul class=\"materials\">\n";
    for (const auto& material : spec.materials) {
        out << "<li>";
        render_media(out, material.image_ref, material.name, false);
        out << html_escape(material.name);
        if (!material.purchase_link.empty()) {
            out << " <a href=\"" << html_escape(material.purchase_link)
                << "\">where to buy</a>";
        }
        out << "</li>\n";
    }
    out << "</ul>\n</section>\n";

    out << "<section id=\"steps\">\n<h2>Step by Step</h2>\n<ol>\n";
    for (const auto& step : spec.steps) {
        out << "<li><p>" << html_escape(step.instruction) << "</p>";
        render_media(out, step.illustration_ref, "step " + std::to_string(step.ordinal), false);
        render_media(out, step.narration_ref, "", true);
        out << "</li>\n";
    }
    out << "</ol>\n</section>\n";

    out << "<section id=\"safety\">\n<h2>Stay Safe</h2>\n<ul class=\"safety-list\">\n";
    for (const auto& note : spec.safety) {
        out << "<li class=\"safety " << severity_name(note.severity) << "\">"
            << html_escape(note.text);
        render_media(out, note.audio_ref, "", true);
        out << "</li>\n";
    }
    out << "</ul>\n</section>\n";

    out << "<section id=\"summary\">\n<h2>What We Learned</h2>\n<p>"
        << html_escape(spec.summary) << "</p>\n</section>\n";

    out << "<script>" << kBookletScript << "</script>\n</body>\n</html>\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// The booklet PDSA loop
// ---------------------------------------------------------------------------

BookletBuilder::BookletBuilder(EngineDeps deps, BookletConfig config)
    : deps_(std::move(deps)), config_(config) {
    if (!deps_.gateway) throw std::invalid_argument("booklet builder requires a gateway");
    if (!deps_.registry) throw std::invalid_argument("booklet builder requires a registry");
    if (config_.max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
}

static std::string booklet_tool_catalogue(const ToolRegistry& registry) {
    std::ostringstream out;
    for (const auto& name : registry.tool_names()) {
        const auto& descriptor = registry.lookup(name);
        if (descriptor.category != ToolCategory::booklet) continue;
        out << "- " << name << ": " << descriptor.input_schema << "\n";
    }
    return out.str();
}

static std::string booklet_plan_prompt(const std::string& topic,
                                       const KnowledgeState& knowledge,
                                       const ToolRegistry& registry) {
    std::ostringstream prompt;
    prompt << "Plan how to gather the content for a children's science booklet about the "
              "experiment below: replicable procedures, required materials, and safety "
              "precautions. Propose several alternative plans.\n"
           << "Experiment: " << topic << "\nKnown facts:\n" << knowledge.to_prompt_block()
           << "\nTools:\n" << booklet_tool_catalogue(registry)
           << "Reply with only a JSON array of plans, each {\"Number\": int, \"description\": "
              "str, \"steps\": [{\"tool\": str, \"input\": str}]}.";
    return prompt.str();
}

static std::string draft_prompt(const std::string& topic, const KnowledgeState& knowledge,
                                const ExecutionResult& result) {
    std::ostringstream prompt;
    prompt << "Draft the booklet content for the experiment below using the gathered "
              "material. Write for young readers.\nExperiment: " << topic
           << "\nKnown facts:\n" << knowledge.to_prompt_block() << "\nTool results:\n";
    for (const auto& outcome : result.step_outcomes) {
        prompt << "- " << outcome.tool_name << (outcome.success ? " (ok): " : " (failed): ")
               << outcome.output << "\n";
    }
    prompt << "Reply with one JSON object: {\"topic\": str, \"principle\": str, "
              "\"introduction\": str, \"steps\": [str], \"safety\": [{\"text\": str, "
              "\"severity\": \"info|caution|danger\"}], \"summary\": str, "
              "\"materials\": [str]}.";
    return prompt.str();
}

static BookletSpec parse_draft(const nlohmann::json& obj, const std::string& topic) {
    BookletSpec spec;
    spec.topic = obj.value("topic", topic);
    spec.principle = obj.value("principle", "");
    spec.intro = obj.contains("introduction") ? obj.value("introduction", "")
                                              : obj.value("intro", "");
    spec.summary = obj.value("summary", "");
    int ordinal = 0;
    for (const auto& item : obj.value("steps", nlohmann::json::array())) {
        StepCard card;
        card.ordinal = ++ordinal;
        card.instruction = item.is_string() ? item.get<std::string>()
                                            : item.value("instruction", "");
        spec.steps.push_back(std::move(card));
    }
    for (const auto& item : obj.value("safety", nlohmann::json::array())) {
        SafetyNote note;
        if (item.is_string()) {
            note.text = item.get<std::string>();
        } else {
            note.text = item.value("text", "");
            note.severity = severity_from_name(item.value("severity", "info"));
        }
        if (!note.text.empty()) spec.safety.push_back(std::move(note));
    }
    for (const auto& item : obj.value("materials", nlohmann::json::array())) {
        if (item.is_string()) spec.materials.push_back(MaterialItem{item.get<std::string>(), "", ""});
    }
    return spec;
}

static std::string normalize_key(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

static std::optional<QualityVerdict> parse_verdict(const std::string& reply, int tau) {
    auto obj = first_json_object(reply);
    if (!obj || !obj->is_object()) return std::nullopt;
    std::map<std::string, int> values;
    for (auto it = obj->begin(); it != obj->end(); ++it) {
        if (!it.value().is_number()) continue;
        values[normalize_key(it.key())] =
            std::clamp(static_cast<int>(std::lround(it.value().get<double>())), 0, 100);
    }
    auto need = [&](const char* key) -> std::optional<int> {
        auto it = values.find(key);
        if (it == values.end()) return std::nullopt;
        return it->second;
    };
    auto rel = need("relevance");
    auto iq = need("instructionalquality");
    auto attr = need("attractiveness");
    auto ev = need("educationalvalue");
    if (!rel || !iq || !attr || !ev) return std::nullopt;
    QualityVerdict verdict;
    verdict.relevance = *rel;
    verdict.instructional_quality = *iq;
    verdict.attractiveness = *attr;
    verdict.educational_value = *ev;
    verdict.pass = verdict.lowest() >= tau;
    return verdict;
}

std::pair<BookletSpec, std::vector<CycleRecord>> BookletBuilder::build(
    const std::string& topic, const fs::path& out_dir) {
    if (trim(topic).empty()) throw std::invalid_argument("booklet topic must be non-empty");
    executed_.clear();

    KnowledgeState knowledge;
    std::vector<CycleRecord> trace;
    std::optional<SolutionPool> pending;
    BookletSpec spec;
    spec.topic = topic;
    Query query{topic, true};
    IdfFn idf_of = deps_.corpus
                       ? IdfFn([corpus = deps_.corpus](const std::string& k) {
                             return idf(k, *corpus);
                         })
                       : IdfFn([](const std::string&) { return 0.0; });
    bool any_step_success = false;

    auto tracked = [&](Role role, const std::string& prompt, CycleRecord& record) {
        ChatRequest request;
        request.role = role;
        request.prompt = prompt;
        ChatResponse response = deps_.gateway->complete(request);
        record.backend_calls.push_back(
            BackendCallUsage{role_name(role), response.elapsed_s, response.cost_usd});
        return response;
    };

    try {
        for (int cycle = 1; cycle <= config_.max_rounds; ++cycle) {
            deps_.gateway->set_cycle(cycle);
            CycleRecord record;
            record.cycle_index = cycle;

            SolutionPool pool;
            if (pending) {
                pool = sanitize_pool(std::move(*pending), cycle, config_.pool_cap, executed_);
                pending.reset();
            } else {
                std::string prompt = booklet_plan_prompt(topic, knowledge, *deps_.registry);
                for (int attempt = 0; attempt < 2; ++attempt) {
                    ChatResponse response = tracked(Role::booklet, prompt, record);
                    pool.plans = validate_plans_against(parse_plan_reply(response.text),
                                                        *deps_.registry);
                    if (!pool.plans.empty()) break;
                    prompt += "\nYour previous reply contained no valid plans. Output only the "
                              "JSON array.";
                }
                for (auto& plan : pool.plans) plan.origin = PlanOrigin::fresh;
                pool = sanitize_pool(std::move(pool), cycle, config_.pool_cap, executed_);
            }
            record.pool = pool;

            QualityVerdict verdict;
            if (pool.plans.empty()) {
                record.result.synthesized_text = "planning failed: no valid plans this cycle";
                record.confidence = ConfidenceScore{0, "no plans were available to execute"};
            } else {
                std::vector<ChatResponse> judge_calls;
                record.scores = score_pool(pool, deps_.profiles, idf_of, query, knowledge,
                                           *deps_.gateway, config_.lambda_percep, 1.0,
                                           &judge_calls);
                for (const auto& call : judge_calls) {
                    record.backend_calls.push_back(
                        BackendCallUsage{"evaluator", call.elapsed_s, call.cost_usd});
                }
                const CandidatePlan& chosen = select_best(pool, record.scores,
                                                          config_.lambda_percep);
                executed_.insert({chosen.number, chosen.description});
                record.chosen_plan = chosen.number;
                record.result.plan_number = chosen.number;
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
                        throw;
                    } catch (const TransportError&) {
                        throw;
                    } catch (const std::exception& e) {
                        outcome.success = false;
                        outcome.output = e.what();
                    }
                    if (outcome.success) any_step_success = true;
                    record.result.step_outcomes.push_back(std::move(outcome));
                }

                // Draft the booklet content from whatever was gathered.
                std::string prompt = draft_prompt(topic, knowledge, record.result);
                std::optional<nlohmann::json> draft;
                for (int attempt = 0; attempt < 2 && !draft; ++attempt) {
                    ChatResponse response = tracked(Role::booklet, prompt, record);
                    draft = first_json_object(response.text);
                    if (!draft) prompt += "\nOutput only the JSON object.";
                }
                if (draft) {
                    BookletSpec parsed = parse_draft(*draft, topic);
                    // Materials seen by the entity recognizer win over the
                    // draft's own list.
                    std::vector<std::string> entity_names;
                    for (const auto& outcome : record.result.step_outcomes) {
                        if (outcome.tool_name == "EntityRecognition" && outcome.success) {
                            for (const auto& name : parse_entity_list(outcome.output)) {
                                if (std::find(entity_names.begin(), entity_names.end(), name) ==
                                    entity_names.end()) {
                                    entity_names.push_back(name);
                                }
                            }
                        }
                    }
                    if (!entity_names.empty()) {
                        parsed.materials.clear();
                        for (const auto& name : entity_names) {
                            parsed.materials.push_back(MaterialItem{name, "", ""});
                        }
                    }
                    spec = std::move(parsed);
                }
                record.result.synthesized_text = spec.intro.empty() ? spec.topic : spec.intro;

                // Verdict over the four target properties.
                std::string verdict_prompt_text =
                    "Rate the booklet draft below from 0 to 100 on each property. Reply with "
                    "one JSON object with keys relevance, instructional_quality, "
                    "attractiveness, educational_value.\n" +
                    booklet_spec_to_json(spec).dump();
                std::optional<QualityVerdict> parsed_verdict;
                for (int attempt = 0; attempt < 2 && !parsed_verdict; ++attempt) {
                    ChatResponse response = tracked(Role::booklet, verdict_prompt_text, record);
                    parsed_verdict = parse_verdict(response.text, config_.tau);
                    if (!parsed_verdict) {
                        verdict_prompt_text += "\nOutput only the JSON object.";
                    }
                }
                if (parsed_verdict) verdict = *parsed_verdict;
                record.confidence = ConfidenceScore{
                    verdict.lowest(),
                    "lowest of relevance/instructional_quality/attractiveness/educational_value"};
            }

            spec.verdict = verdict;
            bool passed = verdict.pass;

            if (!passed && cycle < config_.max_rounds) {
                std::ostringstream study;
                study << "The booklet draft did not meet the quality bar. Explain what is "
                         "missing, summarize anything learned, and propose new or adjusted "
                         "content-gathering plans.\nExperiment: " << topic << "\nDraft: "
                      << booklet_spec_to_json(spec).dump()
                      << "\nReply with one JSON object: {\"failure_analysis\": str, "
                         "\"knowledge_summary\": str, \"new_plans\": [plan array]}.";
                std::optional<nlohmann::json> reply;
                std::string prompt = study.str();
                for (int attempt = 0; attempt < 2 && !reply; ++attempt) {
                    ChatResponse response = tracked(Role::booklet, prompt, record);
                    reply = first_json_object(response.text);
                    if (!reply) prompt += "\nOutput only the JSON object.";
                }
                std::vector<CandidatePlan> new_plans;
                FailureAnalysis analysis;
                if (reply) {
                    analysis.text = reply->value("failure_analysis", "");
                    analysis.knowledge_summary = reply->value("knowledge_summary", "");
                    if (!analysis.knowledge_summary.empty()) {
                        knowledge.append(KnowledgeSource::study, analysis.knowledge_summary,
                                         cycle);
                    }
                    for (const auto& outcome : record.result.step_outcomes) {
                        if (outcome.success && !outcome.output.empty()) {
                            knowledge.append(KnowledgeSource::execution,
                                             outcome.tool_name + ": " + outcome.output, cycle);
                        }
                    }
                    if (reply->contains("new_plans")) {
                        new_plans = parse_plan_array((*reply)["new_plans"]);
                    }
                }
                record.failure = analysis;
                pending = replan_pool(record.pool, record.chosen_plan,
                                      validate_plans_against(std::move(new_plans),
                                                             *deps_.registry),
                                      executed_, config_.pool_cap, topic);
            }

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
            trace.push_back(std::move(record));

            if (passed) break;
        }
    } catch (const TransportError& e) {
        throw RunAbortedError(std::string("backend unreachable: ") + e.what(), trace);
    }

    spec.grounded = any_step_success;

    if (!spec.steps.empty()) {
        spec = gather_assets(std::move(spec), *deps_.registry, out_dir);
        std::ofstream html(out_dir / "booklet.html", std::ios::binary);
        html << render_html(spec);
    }
    return {spec, trace};
}

}  // namespace sciqa
