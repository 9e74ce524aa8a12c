#pragma once

#include "gpbench/prompts.hpp"
#include "gpbench/random.hpp"
#include "gpbench/response.hpp"
#include "gpbench/stimulus.hpp"
#include "gpbench/transport.hpp"

#include "json.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gpbench {

enum class ModelKind { HttpOpenAi, HttpGemini, HttpOllama, Oracle };
std::string_view kind_name(ModelKind k);
std::optional<ModelKind> parse_kind(std::string_view name);

// Local stand-in for a model: echoes ground truth, perturbs it, guesses, or refuses.
struct OracleMode {
    enum class Kind { Perfect, Noisy, Random, Invalid };
    Kind kind = Kind::Perfect;
    double sigma = 0.0;  // Noisy: Gaussian sd added to each component
    double rate = 0.0;   // Invalid: probability of a refusal; otherwise answers perfectly
};

inline constexpr const char* kRefusalText = "I cannot determine the value.";

struct ModelSpec {
    std::string id;
    ModelKind kind = ModelKind::Oracle;
    std::string endpoint;      // full request URL for HTTP kinds
    std::string model_name;
    std::string api_key_env;   // name of the variable holding the key; never the key itself
    double temperature = 0.0;
    int max_retries = 3;
    int rate_limit = 60;       // requests per minute, 0 = unlimited
    int timeout_ms = 60000;
    std::optional<OracleMode> oracle;
    std::uint64_t oracle_seed = 0;

    bool is_http() const { return kind != ModelKind::Oracle; }
    // Throws std::invalid_argument on an inconsistent spec.
    void validate() const;
};

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_from_json(const nlohmann::json& j);

enum class GatewayErrorKind { Auth, RetriesExhausted, MalformedEndpoint, Rejected, BadResponse };
std::string_view error_kind_name(GatewayErrorKind k);

class GatewayError : public std::runtime_error {
public:
    GatewayError(GatewayErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    GatewayErrorKind kind() const { return kind_; }

private:
    GatewayErrorKind kind_;
};

// Wire formats of the three HTTP adapter families.
namespace wire {
nlohmann::json request_body(const ModelSpec& spec, const std::string& prompt, const std::string& png_base64);
std::vector<std::pair<std::string, std::string>> request_headers(const ModelSpec& spec, const std::string& api_key);
// Throws GatewayError(BadResponse) when the payload has no answer text.
std::string response_text(ModelKind kind, const nlohmann::json& body);
}  // namespace wire

std::string oracle_answer(const OracleMode& mode, const AnswerSchema& schema, const GroundTruth& truth, Rng& rng);

// On-disk response cache, one JSON file per key under a two-level hex fan-out.
// Reads may run concurrently; writes are serialized.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);

    static std::string key(const std::string& model_id, const std::string& stimulus_id, const std::string& prompt_hash,
                           int run_index);

    std::optional<RawResponse> get(const std::string& key) const;
    void put(const std::string& key, const RawResponse& response);

private:
    std::filesystem::path path_for(const std::string& key) const;

    std::filesystem::path dir_;
    mutable std::shared_mutex mutex_;
};

// Append-only JSONL journal, one RawResponse per line, single writer.
class ResponseJournal {
public:
    explicit ResponseJournal(const std::filesystem::path& file);
    void append(const RawResponse& response);

    static std::vector<RawResponse> read(const std::filesystem::path& file);

private:
    std::mutex mutex_;
    std::ofstream out_;
};

using SteadyTime = std::chrono::steady_clock::time_point;

struct Clock {
    std::function<SteadyTime()> now = [] { return std::chrono::steady_clock::now(); };
    std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
        std::this_thread::sleep_for(d);
    };
};

// Sliding-window limiter: at most `per_minute` acquisitions inside any 60 s window.
class RateLimiter {
public:
    RateLimiter(int per_minute, Clock clock);
    void acquire();

private:
    int per_minute_;
    Clock clock_;
    std::mutex mutex_;
    std::deque<SteadyTime> recent_;
};

struct GatewayEnv {
    std::shared_ptr<HttpTransport> transport = std::make_shared<HttplibTransport>();
    std::function<std::optional<std::string>(const std::string&)> getenv = [](const std::string& name) {
        const char* v = std::getenv(name.c_str());
        return v ? std::optional<std::string>(v) : std::nullopt;
    };
    Clock clock;
    std::chrono::milliseconds backoff_base{1000};
};

struct QueryFailure {
    std::string stimulus_id;
    int run_index = 1;
    GatewayErrorKind kind = GatewayErrorKind::RetriesExhausted;
    std::string message;
};

struct BatchResult {
    std::vector<RawResponse> responses;  // stimulus-major, run-minor order; failed slots omitted
    std::vector<QueryFailure> failures;
};

class ModelGateway {
public:
    ModelGateway(ModelSpec spec, ResponseCache* cache, GatewayEnv env = {});

    const ModelSpec& spec() const { return spec_; }

    RawResponse query(const Stimulus& stimulus, const PromptTemplate& prompt, int run_index);

    // stimuli x runs queries on up to `concurrency` threads. Fresh responses
    // go to the journal as they complete; per-query errors become failures.
    BatchResult run_batch(std::span<const Stimulus> stimuli, const PromptTemplate& prompt, int runs, int concurrency,
                          ResponseJournal* journal);

    std::size_t upstream_calls() const { return upstream_calls_.load(); }

    // Delay before retry number `attempt` (0-based): base * 2^attempt, +-20% jitter.
    std::chrono::milliseconds backoff_delay(int attempt, Rng& rng) const;

private:
    std::string ask_http(const Stimulus& stimulus, const PromptTemplate& prompt, const std::string& key);

    ModelSpec spec_;
    ResponseCache* cache_;
    GatewayEnv env_;
    std::optional<ParsedUrl> url_;
    std::unique_ptr<RateLimiter> limiter_;
    std::atomic<std::size_t> upstream_calls_{0};
};

}  // namespace gpbench
