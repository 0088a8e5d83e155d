#include "sciqa/backend.hpp"

#include "sciqa/json_util.hpp"

#define CPPHTTPLIB_NO_EXCEPTIONS
#include <httplib.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace sciqa {

const char* role_name(Role role) {
    switch (role) {
        case Role::planner: return "planner";
        case Role::captioner: return "captioner";
        case Role::evaluator: return "evaluator";
        case Role::judge: return "judge";
        case Role::study: return "study";
        case Role::booklet: return "booklet";
    }
    return "?";
}

Role role_from_name(const std::string& name) {
    if (name == "planner") return Role::planner;
    if (name == "captioner") return Role::captioner;
    if (name == "evaluator") return Role::evaluator;
    if (name == "judge") return Role::judge;
    if (name == "study") return Role::study;
    if (name == "booklet") return Role::booklet;
    throw std::invalid_argument("unknown backend role: " + name);
}

double PriceTable::cost(const std::string& model, const TokenUsage& usage) const {
    auto it = prices_.find(model);
    if (it == prices_.end()) return 0.0;
    return usage.input * it->second.input_per_token + usage.output * it->second.output_per_token;
}

PriceTable PriceTable::from_json(const nlohmann::json& j) {
    PriceTable table;
    for (auto it = j.begin(); it != j.end(); ++it) {
        PriceEntry entry;
        entry.input_per_token = it.value().value("in", 0.0);
        entry.output_per_token = it.value().value("out", 0.0);
        table.set(it.key(), entry);
    }
    return table;
}

std::string BackendConfig::model_for(Role role) const {
    auto it = models.find(role_name(role));
    if (it != models.end()) return it->second;
    return default_model;
}

BackendConfig BackendConfig::from_json(const nlohmann::json& j) {
    BackendConfig c;
    c.mode = j.value("mode", "mock");
    c.chat_endpoint = j.value("endpoint", "");
    c.embed_endpoint = j.value("embed_endpoint", "");
    c.default_model = j.value("model", "default");
    if (j.contains("models")) {
        for (auto it = j["models"].begin(); it != j["models"].end(); ++it) {
            c.models[it.key()] = it.value().get<std::string>();
        }
    }
    if (j.contains("price_table")) c.prices = PriceTable::from_json(j["price_table"]);
    c.timeout_s = j.value("timeout_s", 30.0);
    c.retries = j.value("retries", 2);
    c.scenario_path = j.value("scenario_path", "");
    c.embed_dim = j.value("embed_dim", 256);
    c.embed_seed = j.value("embed_seed", uint64_t{0});
    return c;
}

// ---------------------------------------------------------------------------
// Mock embedder: seeded 64-bit FNV-1a term hash scattered over `dim`
// buckets, then L2-normalized. No std::hash so vectors are identical
// across processes and platforms.
// ---------------------------------------------------------------------------

static uint64_t fnv1a(const std::string& s, uint64_t seed) {
    uint64_t h = 1469598103934665603ull ^ (seed * 1099511628211ull);
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<double> hash_embed(const std::string& text, uint64_t seed, int dim) {
    if (dim <= 0) throw std::invalid_argument("embedding dimension must be positive");
    std::vector<double> v(static_cast<size_t>(dim), 0.0);
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        uint64_t h = fnv1a(token, seed);
        size_t bucket = static_cast<size_t>(h % static_cast<uint64_t>(dim));
        double sign = ((h >> 32) & 1u) ? 1.0 : -1.0;
        v[bucket] += sign;
        token.clear();
    };
    for (char raw : text) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (std::isalnum(c)) {
            token.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
        // Empty/degenerate text embeds to a fixed unit axis.
        v[0] = 1.0;
    } else {
        for (double& x : v) x /= norm;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Scenario script
// ---------------------------------------------------------------------------

ScenarioScript ScenarioScript::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path.string());
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

ScenarioScript ScenarioScript::from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw std::runtime_error("scenario file must be a JSON array");
    ScenarioScript script;
    std::set<std::tuple<std::string, int, int>> seen;
    for (const auto& item : j) {
        ScenarioEntry e;
        e.role = item.at("role").get<std::string>();
        role_from_name(e.role);  // validate
        e.cycle = item.value("cycle", 0);
        e.occurrence = item.value("occurrence", 1);
        e.response = item.at("response").get<std::string>();
        if (item.contains("usage")) {
            e.usage.input = item["usage"].value("in", 0L);
            e.usage.output = item["usage"].value("out", 0L);
        }
        e.elapsed_s = item.value("elapsed_s", 0.0);
        auto key = std::make_tuple(e.role, e.cycle, e.occurrence);
        if (!seen.insert(key).second) {
            throw std::runtime_error("duplicate scenario key (" + e.role + ", cycle " +
                                     std::to_string(e.cycle) + ", occurrence " +
                                     std::to_string(e.occurrence) + ")");
        }
        script.entries_.push_back(std::move(e));
    }
    return script;
}

const ScenarioEntry* ScenarioScript::find(const std::string& role, int cycle,
                                          int occurrence) const {
    for (const auto& e : entries_) {
        if (e.role == role && e.cycle == cycle && e.occurrence == occurrence) return &e;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Mock gateway
// ---------------------------------------------------------------------------

MockGateway::MockGateway(BackendConfig config) : config_(std::move(config)) {
    if (!config_.scenario_path.empty()) {
        script_ = ScenarioScript::load(config_.scenario_path);
    }
}

void MockGateway::set_cycle(int cycle) {
    std::lock_guard<std::mutex> lock(mutex_);
    cycle_ = cycle;
    // A fresh cycle restarts the per-role occurrence count for that cycle;
    // counters are keyed by (role, cycle) so nothing needs resetting here.
}

ChatResponse MockGateway::complete(const ChatRequest& request) {
    std::lock_guard<std::mutex> lock(mutex_);
    const std::string role = role_name(request.role);
    int occ = ++occurrence_counter_[{role, cycle_}];
    const ScenarioEntry* entry = script_.find(role, cycle_, occ);
    if (!entry) {
        throw ScenarioMissError("no scenario entry for (role=" + role +
                                ", cycle=" + std::to_string(cycle_) +
                                ", occurrence=" + std::to_string(occ) + ")");
    }
    ChatResponse resp;
    resp.text = entry->response;
    resp.usage = entry->usage;
    resp.elapsed_s = entry->elapsed_s;
    const std::string model = request.model.empty() ? config_.model_for(request.role)
                                                    : request.model;
    resp.cost_usd = config_.prices.cost(model, entry->usage);
    return resp;
}

std::vector<std::vector<double>> MockGateway::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) throw std::invalid_argument("embed requires at least one text");
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        out.push_back(hash_embed(t, config_.embed_seed, config_.embed_dim));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Network gateway: one generic chat-completion POST shape. Exact provider
// schemas are an adapter concern configured at the endpoint, not a code
// contract.
// ---------------------------------------------------------------------------

namespace {

class HttplibTransport : public Transport {
public:
    std::pair<int, std::string> post_json(const std::string& url, const std::string& body,
                                          double timeout_s) override {
        auto split = url.find('/', url.find("//") + 2);
        std::string host = split == std::string::npos ? url : url.substr(0, split);
        std::string path = split == std::string::npos ? "/" : url.substr(split);
        httplib::Client client(host);
        client.set_connection_timeout(std::chrono::milliseconds(
            static_cast<long long>(timeout_s * 1000)));
        client.set_read_timeout(std::chrono::milliseconds(
            static_cast<long long>(timeout_s * 1000)));
        auto res = client.Post(path, body, "application/json");
        if (!res) throw TransportError("POST " + url + " failed: " + httplib::to_string(res.error()));
        return {res->status, res->body};
    }
};

}  // namespace

std::shared_ptr<Transport> make_httplib_transport() {
    return std::make_shared<HttplibTransport>();
}

HttpGateway::HttpGateway(BackendConfig config, std::shared_ptr<Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
    if (!transport_) transport_ = make_httplib_transport();
    if (config_.chat_endpoint.empty()) {
        throw std::invalid_argument("network backend requires an endpoint");
    }
}

ChatResponse HttpGateway::complete(const ChatRequest& request) {
    const std::string model = request.model.empty() ? config_.model_for(request.role)
                                                    : request.model;
    nlohmann::json body = {
        {"model", model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
        {"max_tokens", request.max_tokens},
    };
    std::string last_error;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(100 * (1 << (attempt - 1))));
        }
        auto start = std::chrono::steady_clock::now();
        try {
            auto [status, reply] = transport_->post_json(config_.chat_endpoint, body.dump(),
                                                         config_.timeout_s);
            if (status < 200 || status >= 300) {
                last_error = "HTTP " + std::to_string(status);
                continue;
            }
            auto j = nlohmann::json::parse(reply);
            ChatResponse resp;
            resp.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
            if (j.contains("usage")) {
                resp.usage.input = j["usage"].value("prompt_tokens", 0L);
                resp.usage.output = j["usage"].value("completion_tokens", 0L);
            }
            resp.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                           start).count();
            resp.cost_usd = config_.prices.cost(model, resp.usage);
            return resp;
        } catch (const TransportError& e) {
            last_error = e.what();
        } catch (const nlohmann::json::exception& e) {
            last_error = std::string("bad provider reply: ") + e.what();
        }
    }
    throw TransportError("chat completion failed after " + std::to_string(config_.retries + 1) +
                         " attempts: " + last_error);
}

std::vector<std::vector<double>> HttpGateway::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) throw std::invalid_argument("embed requires at least one text");
    nlohmann::json body = {{"model", config_.model_for(Role::planner)}, {"input", texts}};
    std::string url = config_.embed_endpoint.empty() ? config_.chat_endpoint
                                                     : config_.embed_endpoint;
    auto [status, reply] = transport_->post_json(url, body.dump(), config_.timeout_s);
    if (status < 200 || status >= 300) {
        throw TransportError("embedding request failed: HTTP " + std::to_string(status));
    }
    auto j = nlohmann::json::parse(reply);
    std::vector<std::vector<double>> out;
    for (const auto& item : j.at("data")) {
        auto v = item.at("embedding").get<std::vector<double>>();
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm > 0) {
            for (double& x : v) x /= norm;
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::shared_ptr<Gateway> make_gateway(const BackendConfig& config,
                                      std::shared_ptr<Transport> transport) {
    if (config.mode == "mock") return std::make_shared<MockGateway>(config);
    if (config.mode == "network") return std::make_shared<HttpGateway>(config, transport);
    throw std::invalid_argument("unknown backend mode: " + config.mode);
}

}  // namespace sciqa
