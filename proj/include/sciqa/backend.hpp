#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sciqa {

// Single seam for every model call the system makes: chat completion,
// embedding, judging. Two implementations exist, a network client and a
// deterministic scenario-scripted mock. Usage-to-currency accounting
// lives here so the rest of the system only ever sees dollars.

enum class Role { planner, captioner, evaluator, judge, study, booklet };
const char* role_name(Role role);
Role role_from_name(const std::string& name);

struct ChatRequest {
    Role role = Role::planner;
    std::string prompt;
    std::string model;  // empty -> per-role default from config
    int max_tokens = 1024;
};

struct TokenUsage {
    long input = 0;
    long output = 0;
};

struct ChatResponse {
    std::string text;
    TokenUsage usage;
    double elapsed_s = 0.0;
    double cost_usd = 0.0;
};

struct PriceEntry {
    double input_per_token = 0.0;
    double output_per_token = 0.0;
};

// Model identifier -> unit prices. Pricing is explicit config, never code.
class PriceTable {
public:
    void set(const std::string& model, PriceEntry entry) { prices_[model] = entry; }
    double cost(const std::string& model, const TokenUsage& usage) const;

    static PriceTable from_json(const nlohmann::json& j);

private:
    std::map<std::string, PriceEntry> prices_;
};

struct BackendConfig {
    std::string mode = "mock";  // "mock" | "network"
    std::string chat_endpoint;
    std::string embed_endpoint;
    std::map<std::string, std::string> models;  // role name -> model id
    std::string default_model = "default";
    PriceTable prices;
    double timeout_s = 30.0;
    int retries = 2;
    std::string scenario_path;
    int embed_dim = 256;
    uint64_t embed_seed = 0;

    std::string model_for(Role role) const;
    static BackendConfig from_json(const nlohmann::json& j);
};

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised by the mock when a request has no matching scenario entry; the
// message names the missing (role, cycle, occurrence) key so tests can be
// patched quickly.
struct ScenarioMissError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// HTTP seam for the network gateway. Tests substitute a double here; the
// mock gateway never touches one.
class Transport {
public:
    virtual ~Transport() = default;
    // Returns (status, body). Throws TransportError on connection failure.
    virtual std::pair<int, std::string> post_json(const std::string& url,
                                                  const std::string& body,
                                                  double timeout_s) = 0;
};

std::shared_ptr<Transport> make_httplib_transport();

class Gateway {
public:
    virtual ~Gateway() = default;
    virtual ChatResponse complete(const ChatRequest& request) = 0;
    // One unit-norm vector per input text.
    virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
    // PDSA cycle index, used by the mock to key scenario lookups. 0 means
    // "outside any cycle" (profiling, judging, ...).
    virtual void set_cycle(int cycle) { (void)cycle; }
    virtual std::string mode() const = 0;
};

// Deterministic term-hash embedder used by the mock gateway and available
// to tests. Stable across processes for a fixed (seed, dim).
std::vector<double> hash_embed(const std::string& text, uint64_t seed, int dim);

// One canned backend reply. Keys are unique per scenario file; lookups
// consume entries in (role, cycle, occurrence) order.
struct ScenarioEntry {
    std::string role;
    int cycle = 0;
    int occurrence = 1;
    std::string response;
    TokenUsage usage;
    double elapsed_s = 0.0;
};

class ScenarioScript {
public:
    static ScenarioScript load(const std::filesystem::path& path);
    static ScenarioScript from_json(const nlohmann::json& j);

    const ScenarioEntry* find(const std::string& role, int cycle, int occurrence) const;
    size_t size() const { return entries_.size(); }

private:
    std::vector<ScenarioEntry> entries_;
};

class MockGateway : public Gateway {
public:
    explicit MockGateway(BackendConfig config);

    ChatResponse complete(const ChatRequest& request) override;
    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;
    void set_cycle(int cycle) override;
    std::string mode() const override { return "mock"; }

private:
    BackendConfig config_;
    ScenarioScript script_;
    int cycle_ = 0;
    std::map<std::pair<std::string, int>, int> occurrence_counter_;
    std::mutex mutex_;  // scenario consumption is serialized
};

class HttpGateway : public Gateway {
public:
    HttpGateway(BackendConfig config, std::shared_ptr<Transport> transport);

    ChatResponse complete(const ChatRequest& request) override;
    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;
    std::string mode() const override { return "network"; }

private:
    BackendConfig config_;
    std::shared_ptr<Transport> transport_;
};

// Builds the gateway for the configured mode. `transport` is only used in
// network mode; passing a forbidden-transport double plus a mock config is
// how tests prove a run performs zero network operations.
std::shared_ptr<Gateway> make_gateway(const BackendConfig& config,
                                      std::shared_ptr<Transport> transport = nullptr);

}  // namespace sciqa
