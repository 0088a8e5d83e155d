#pragma once

#include "sciqa/backend.hpp"
#include "sciqa/tool_registry.hpp"
#include "sciqa/types.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sciqa {

// One config file drives every command. Flags mirror these keys one-to-one
// and win over the file.

struct AppConfig {
    RunConfig run;
    BackendConfig backend;
    uint64_t seed = 0;
    std::string kb_dir;                   // corpus directory; empty -> no knowledge base
    std::string kb_store = "out/kb";      // embedding store cache
    std::string profiles_path;            // tool cost priors; empty -> assumed profiles
    double sample_fps = 1.0;
    int booklet_tau = 70;
    int retrieval_k = 3;
    // Optional scripted tool outcomes, consumed in order per tool.
    std::map<std::string, std::vector<ToolOutcome>> tool_scripts;
};

AppConfig app_config_from_json(const nlohmann::json& j);
AppConfig load_app_config(const std::filesystem::path& path);

}  // namespace sciqa
