#include "sciqa/cli.hpp"

#include "sciqa/bench.hpp"
#include "sciqa/booklet.hpp"
#include "sciqa/engine.hpp"
#include "sciqa/json_util.hpp"
#include "sciqa/knowledge_base.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <set>

namespace sciqa {

namespace fs = std::filesystem;

namespace {

struct Runtime {
    AppConfig config;
    std::shared_ptr<Gateway> gateway;
    ToolRegistry registry;
    ProfileMap profiles;
    std::optional<Corpus> corpus;
    std::optional<EmbeddingStore> store;
};

std::string embedder_id(const AppConfig& config) {
    if (config.backend.mode == "mock") {
        return "term-hash-v1/seed=" + std::to_string(config.backend.embed_seed) +
               "/dim=" + std::to_string(config.backend.embed_dim);
    }
    return "remote/" + config.backend.model_for(Role::planner);
}

Runtime make_runtime(AppConfig config, std::shared_ptr<Transport> transport, bool with_kb) {
    Runtime rt;
    rt.config = std::move(config);
    rt.gateway = make_gateway(rt.config.backend, std::move(transport));
    rt.registry = register_builtin_tools(rt.gateway);
    for (const auto& [name, outcomes] : rt.config.tool_scripts) {
        if (rt.registry.has(name)) rt.registry.script_outcomes(name, outcomes);
    }
    if (!rt.config.profiles_path.empty()) {
        rt.profiles = load_profile_store(rt.config.profiles_path);
    }
    if (with_kb && !rt.config.kb_dir.empty()) {
        rt.corpus = ingest_corpus(rt.config.kb_dir);
        rt.store = embed_and_store(*rt.corpus, gateway_embedder(rt.gateway),
                                   embedder_id(rt.config), rt.config.backend.embed_dim,
                                   rt.config.kb_store);
    }
    return rt;
}

EngineDeps engine_deps(Runtime& rt) {
    EngineDeps deps;
    deps.gateway = rt.gateway;
    deps.registry = &rt.registry;
    deps.profiles = rt.profiles;
    deps.corpus = rt.corpus ? &*rt.corpus : nullptr;
    deps.store = rt.store ? &*rt.store : nullptr;
    deps.embedder = gateway_embedder(rt.gateway);
    deps.retrieval_k = rt.config.retrieval_k;
    return deps;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

int cmd_profile(Runtime& rt, const std::string& out_path, int probes) {
    ProfileMap profiles;
    for (const auto& name : rt.registry.tool_names()) {
        profiles[name] = profile_tool(rt.registry, name, probes, rt.config.seed);
        std::cout << name << ": latency " << profiles[name].mean_latency_s << " s, cost $"
                  << profiles[name].mean_cost_usd << ", success "
                  << profiles[name].success_prob << "\n";
    }
    save_profile_store(out_path, profiles);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_kb_build(Runtime& rt) {
    if (!rt.corpus) throw std::runtime_error("kb-build requires kb_dir in config or --corpus");
    std::cout << "ingested " << rt.corpus->size() << " chapters, " << rt.store->size()
              << " embedding records -> " << rt.config.kb_store << "\n";
    return 0;
}

int cmd_kb_query(Runtime& rt, const std::string& query, int k) {
    if (!rt.corpus || !rt.store) {
        throw std::runtime_error("kb-query requires kb_dir in config or --corpus");
    }
    auto hits = retrieve_top_k(query, k, *rt.store, gateway_embedder(rt.gateway));
    for (const auto& hit : hits) {
        std::cout << hit.chapter_id << "\t" << hit.similarity << "\n";
    }
    return 0;
}

int cmd_ask(Runtime& rt, const std::string& query_text, const std::string& video_path,
            bool want_booklet, const fs::path& out_dir) {
    Engine engine(engine_deps(rt), rt.config.run);
    Query query{query_text, want_booklet};
    VideoSource video{video_path, rt.config.sample_fps, ""};

    std::vector<CycleRecord> trace;
    FinalAnswer answer;
    try {
        std::tie(answer, trace) = engine.run(query, video);
    } catch (const RunAbortedError& e) {
        write_trace(out_dir / "trace.jsonl", e.partial_trace);
        std::cerr << "error: " << e.what() << " (partial trace written)\n";
        return 1;
    }
    write_trace(out_dir / "trace.jsonl", trace);
    write_text(out_dir / "answer.txt", answer.text + "\n");
    auto [seconds, cost] = usage_totals(trace);
    std::cout << answer.text << "\n";
    std::cout << "[cycles=" << answer.cycles_used << " confidence=" << answer.confidence.value
              << " forced=" << (answer.forced ? "true" : "false") << " elapsed=" << seconds
              << "s cost=$" << cost << "]\n";

    if (want_booklet) {
        BookletConfig bc;
        bc.max_rounds = rt.config.run.max_rounds;
        bc.tau = rt.config.booklet_tau;
        bc.lambda_percep = rt.config.run.lambda_percep;
        bc.pool_cap = rt.config.run.pool_cap;
        BookletBuilder builder(engine_deps(rt), bc);
        auto [spec, booklet_trace] = builder.build(query_text, out_dir / "booklet");
        write_text(out_dir / "booklet" / "booklet_spec.json",
                   booklet_spec_to_json(spec).dump(2) + "\n");
        write_trace(out_dir / "booklet" / "booklet_trace.jsonl", booklet_trace);
        std::cout << "[booklet pass=" << (spec.verdict.pass ? "true" : "false") << " -> "
                  << (out_dir / "booklet" / "booklet.html").string() << "]\n";
    }
    return 0;
}

int cmd_booklet(Runtime& rt, const std::string& topic, const fs::path& out_dir) {
    BookletConfig bc;
    bc.max_rounds = rt.config.run.max_rounds;
    bc.tau = rt.config.booklet_tau;
    bc.lambda_percep = rt.config.run.lambda_percep;
    bc.pool_cap = rt.config.run.pool_cap;
    BookletBuilder builder(engine_deps(rt), bc);
    fs::create_directories(out_dir);
    auto [spec, trace] = builder.build(topic, out_dir);
    write_text(out_dir / "booklet_spec.json", booklet_spec_to_json(spec).dump(2) + "\n");
    write_trace(out_dir / "booklet_trace.jsonl", trace);
    std::cout << "booklet pass=" << (spec.verdict.pass ? "true" : "false") << " grounded="
              << (spec.grounded ? "true" : "false") << " -> "
              << (out_dir / "booklet.html").string() << "\n";
    return 0;
}

int cmd_eval(Runtime& rt, const fs::path& bench_path, const fs::path& answers_path,
             const fs::path& out_dir) {
    auto pairs = load_benchmark(bench_path);

    std::map<std::string, std::string> answers;
    std::ifstream in(answers_path);
    if (!in) throw std::runtime_error("cannot open answers file: " + answers_path.string());
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto j = nlohmann::json::parse(line);
        answers[j.at("id").get<std::string>()] = j.at("answer").get<std::string>();
    }

    std::ostringstream verdict_lines;
    int judged = 0, skipped = 0;
    for (const auto& qa : pairs) {
        auto it = answers.find(qa.id);
        if (it == answers.end()) {
            std::cerr << "warning: no answer for " << qa.id << ", skipping\n";
            ++skipped;
            continue;
        }
        try {
            // Both metrics must land for the pair to count.
            JudgeVerdict rel = judge_answer(Metric::relevance, qa, it->second, *rt.gateway);
            JudgeVerdict acc = judge_answer(Metric::accuracy, qa, it->second, *rt.gateway);
            for (const JudgeVerdict* v : {&rel, &acc}) {
                nlohmann::json j = {{"id", qa.id},
                                    {"category", category_name(qa.category)},
                                    {"metric", metric_name(v->metric)},
                                    {"score", v->score}};
                verdict_lines << j.dump() << "\n";
            }
            ++judged;
        } catch (const std::exception& e) {
            std::cerr << "warning: judge failed for " << qa.id << " (" << e.what()
                      << "), pair excluded\n";
            ++skipped;
        }
    }
    write_text(out_dir / "verdicts.jsonl", verdict_lines.str());
    std::cout << "judged " << judged << " pairs, skipped " << skipped << " -> "
              << (out_dir / "verdicts.jsonl").string() << "\n";
    return 0;
}

int cmd_report(const fs::path& verdicts_path, const std::string& education_path,
               const fs::path& out_dir, const std::string& system_name) {
    std::ifstream in(verdicts_path);
    if (!in) throw std::runtime_error("cannot open verdicts file: " + verdicts_path.string());
    std::vector<CategorizedScore> scores;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto j = nlohmann::json::parse(line);
        CategorizedScore score;
        score.category = category_from_name(j.at("category").get<std::string>());
        score.metric = j.at("metric").get<std::string>() == "relevance" ? Metric::relevance
                                                                        : Metric::accuracy;
        score.score = j.at("score").get<double>();
        scores.push_back(score);
    }
    ScoreTable table = aggregate_scores(scores);
    std::string markdown = render_markdown(table, system_name);
    std::string csv = render_csv(table, system_name);

    if (!education_path.empty()) {
        // One JSON object per line mapping aspect -> winning model; missing
        // aspects count as void. Models are the union of winners.
        std::ifstream edu(education_path);
        if (!edu) throw std::runtime_error("cannot open education verdicts: " + education_path);
        std::vector<EducationVerdict> verdicts;
        std::set<std::string> model_set;
        while (std::getline(edu, line)) {
            if (trim(line).empty()) continue;
            auto j = nlohmann::json::parse(line);
            EducationVerdict verdict;
            for (const auto& aspect : education_aspects()) {
                if (j.contains(aspect) && j[aspect].is_string()) {
                    verdict.winner_by_aspect[aspect] = j[aspect].get<std::string>();
                    model_set.insert(j[aspect].get<std::string>());
                }
            }
            verdicts.push_back(std::move(verdict));
        }
        std::vector<std::string> models(model_set.begin(), model_set.end());
        WinRateTable rates = win_rates(verdicts, models);
        markdown += "\n" + render_win_rates_markdown(rates, models);
        csv += render_win_rates_csv(rates, models);
    }

    write_text(out_dir / "report.md", markdown);
    write_text(out_dir / "report.csv", csv);
    std::cout << markdown;
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::shared_ptr<Transport> transport) {
    CLI::App app{"Iterative plan-execute-reflect engine for answering questions about "
                 "science videos, with an optional educational booklet generator."};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file")
        ->envname("AGENT_CONFIG");
    int64_t seed_flag = -1;
    app.add_option("--seed", seed_flag, "Seed for randomized behavior (probe inputs, "
                                        "mock embeddings)");

    auto* profile = app.add_subcommand("profile", "Probe every tool and write the cost "
                                                  "profile store");
    std::string profile_out = "out/profiles.json";
    int probes = 20;
    profile->add_option("--out", profile_out, "Profile store path");
    profile->add_option("--probes", probes, "Probe calls per tool")->check(CLI::PositiveNumber);

    auto* kb_build = app.add_subcommand("kb-build", "Ingest the corpus and build the "
                                                    "embedding store");
    std::string corpus_flag;
    kb_build->add_option("--corpus", corpus_flag, "Corpus directory (overrides config kb_dir)");
    std::string store_flag;
    kb_build->add_option("--store", store_flag, "Embedding store directory");

    auto* kb_query = app.add_subcommand("kb-query", "Print the top-k chapters for a query");
    std::string kb_query_text;
    int top_k = 3;
    kb_query->add_option("--query", kb_query_text, "Query text")->required();
    kb_query->add_option("--k", top_k, "Number of hits")->check(CLI::PositiveNumber);
    kb_query->add_option("--corpus", corpus_flag, "Corpus directory (overrides config kb_dir)");

    auto* ask = app.add_subcommand("ask", "Answer a question about a video");
    std::string query_text, video_path, out_dir = "out";
    int max_rounds_flag = -1, tau_flag = -1;
    bool want_booklet = false;
    ask->add_option("--query", query_text, "The question")->required();
    ask->add_option("--video", video_path, "Video path or URI")->required();
    ask->add_option("--out", out_dir, "Output directory");
    ask->add_option("--max-rounds", max_rounds_flag, "Maximum PDSA cycles");
    ask->add_option("--tau", tau_flag, "Confidence threshold");
    ask->add_flag("--booklet", want_booklet, "Also generate the booklet bundle");

    auto* booklet = app.add_subcommand("booklet", "Generate an educational booklet bundle");
    std::string topic;
    booklet->add_option("--topic", topic, "Experiment topic")->required();
    booklet->add_option("--out", out_dir, "Output directory");
    booklet->add_option("--max-rounds", max_rounds_flag, "Maximum PDSA cycles");
    booklet->add_option("--tau", tau_flag, "Per-property verdict threshold");

    auto* eval = app.add_subcommand("eval", "Judge candidate answers against a benchmark");
    std::string bench_path, answers_path;
    eval->add_option("--bench", bench_path, "Benchmark JSONL")->required();
    eval->add_option("--answers", answers_path, "Answers JSONL ({id, answer} per line)")
        ->required();
    eval->add_option("--out", out_dir, "Output directory");

    auto* report = app.add_subcommand("report", "Render score tables from judged verdicts");
    std::string verdicts_path, system_name = "this-system", education_path;
    report->add_option("--verdicts", verdicts_path, "Verdicts JSONL")->required();
    report->add_option("--education", education_path,
                       "Education verdicts JSONL (winner per aspect) for the win-rate table");
    report->add_option("--out", out_dir, "Output directory");
    report->add_option("--name", system_name, "System name for the report rows");

    std::vector<const char*> argv;
    argv.push_back("sciqa");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 2;
    }

    try {
        AppConfig config;
        if (!config_path.empty()) config = load_app_config(config_path);
        if (seed_flag >= 0) {
            config.seed = static_cast<uint64_t>(seed_flag);
            config.backend.embed_seed = config.seed;
        }
        if (max_rounds_flag > 0) config.run.max_rounds = max_rounds_flag;
        if (tau_flag >= 0) {
            config.run.tau = tau_flag;
            config.booklet_tau = tau_flag;
        }
        if (!corpus_flag.empty()) config.kb_dir = corpus_flag;
        if (!store_flag.empty()) config.kb_store = store_flag;
        config.run.validate();

        bool needs_kb = kb_build->parsed() || kb_query->parsed() || ask->parsed() ||
                        booklet->parsed();
        Runtime rt = make_runtime(config, transport, needs_kb);

        if (profile->parsed()) return cmd_profile(rt, profile_out, probes);
        if (kb_build->parsed()) return cmd_kb_build(rt);
        if (kb_query->parsed()) return cmd_kb_query(rt, kb_query_text, top_k);
        if (ask->parsed()) return cmd_ask(rt, query_text, video_path, want_booklet, out_dir);
        if (booklet->parsed()) return cmd_booklet(rt, topic, out_dir);
        if (eval->parsed()) return cmd_eval(rt, bench_path, answers_path, out_dir);
        if (report->parsed()) {
            return cmd_report(verdicts_path, education_path, out_dir, system_name);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;  // unreachable with require_subcommand(1)
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace sciqa
