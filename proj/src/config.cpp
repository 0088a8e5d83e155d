#include "sciqa/config.hpp"

#include <fstream>

namespace sciqa {

AppConfig app_config_from_json(const nlohmann::json& j) {
    AppConfig c;
    c.run.max_rounds = j.value("max_rounds", c.run.max_rounds);
    c.run.tau = j.value("tau", c.run.tau);
    c.run.lambda_percep = j.value("lambda_percep", c.run.lambda_percep);
    c.run.pool_cap = j.value("pool_cap", c.run.pool_cap);
    c.run.validate();

    if (j.contains("backend")) c.backend = BackendConfig::from_json(j["backend"]);
    if (c.backend.scenario_path.empty()) {
        c.backend.scenario_path = j.value("scenario_path", "");
    }

    c.seed = j.value("seed", uint64_t{0});
    if (c.seed != 0 && c.backend.embed_seed == 0) c.backend.embed_seed = c.seed;

    c.kb_dir = j.value("kb_dir", "");
    c.kb_store = j.value("kb_store", c.kb_store);
    c.profiles_path = j.value("profiles_path", "");
    c.sample_fps = j.value("sample_fps", 1.0);
    c.booklet_tau = j.value("booklet_tau", 70);
    c.retrieval_k = j.value("retrieval_k", 3);

    if (j.contains("tool_scripts")) {
        for (auto it = j["tool_scripts"].begin(); it != j["tool_scripts"].end(); ++it) {
            std::vector<ToolOutcome> outcomes;
            for (const auto& raw : it.value()) {
                ToolOutcome o;
                o.success = raw.value("success", true);
                o.output = raw.value("output", "");
                o.elapsed_s = raw.value("elapsed_s", 0.0);
                o.cost_usd = raw.value("cost_usd", 0.0);
                outcomes.push_back(std::move(o));
            }
            c.tool_scripts[it.key()] = std::move(outcomes);
        }
    }
    return c;
}

AppConfig load_app_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());
    nlohmann::json j;
    in >> j;
    return app_config_from_json(j);
}

}  // namespace sciqa
