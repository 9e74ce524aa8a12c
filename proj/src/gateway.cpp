#include "gpbench/gateway.hpp"

#include "gpbench/hashing.hpp"
#include "gpbench/image_codec.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace gpbench {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kKindNames{"http_openai_style", "http_gemini_style", "http_ollama_style",
                                                     "oracle"};
constexpr std::array<std::string_view, 5> kErrorNames{"auth", "retries_exhausted", "malformed_endpoint", "rejected",
                                                      "bad_response"};

json oracle_to_json(const OracleMode& m) {
    switch (m.kind) {
        case OracleMode::Kind::Perfect: return {{"mode", "perfect"}};
        case OracleMode::Kind::Noisy: return {{"mode", "noisy"}, {"sigma", m.sigma}};
        case OracleMode::Kind::Random: return {{"mode", "random"}};
        case OracleMode::Kind::Invalid: return {{"mode", "invalid"}, {"rate", m.rate}};
    }
    return {};
}

OracleMode oracle_from_json(const json& j) {
    OracleMode m;
    const std::string mode = j.is_string() ? j.get<std::string>() : j.at("mode").get<std::string>();
    if (mode == "perfect") {
        m.kind = OracleMode::Kind::Perfect;
    } else if (mode == "noisy") {
        m.kind = OracleMode::Kind::Noisy;
        m.sigma = j.at("sigma").get<double>();
    } else if (mode == "random") {
        m.kind = OracleMode::Kind::Random;
    } else if (mode == "invalid") {
        m.kind = OracleMode::Kind::Invalid;
        m.rate = j.at("rate").get<double>();
    } else {
        throw std::invalid_argument("unknown oracle mode: " + mode);
    }
    return m;
}

bool transient(int status) { return status == 0 || status == 429 || (status >= 500 && status <= 599); }

}  // namespace

std::string_view kind_name(ModelKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<ModelKind> parse_kind(std::string_view name) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i)
        if (kKindNames[i] == name) return static_cast<ModelKind>(i);
    return std::nullopt;
}

std::string_view error_kind_name(GatewayErrorKind k) { return kErrorNames[static_cast<std::size_t>(k)]; }

void ModelSpec::validate() const {
    if (id.empty()) throw std::invalid_argument("model id is empty");
    if (!(temperature >= 0.0)) throw std::invalid_argument(id + ": temperature must be >= 0");
    if (max_retries < 0) throw std::invalid_argument(id + ": max_retries must be >= 0");
    if (rate_limit < 0) throw std::invalid_argument(id + ": rate_limit must be >= 0");
    if (is_http()) {
        if (endpoint.empty() || model_name.empty())
            throw std::invalid_argument(id + ": http models need endpoint and model_name");
        return;
    }
    if (!oracle) throw std::invalid_argument(id + ": oracle models need an oracle mode");
    if (oracle->kind == OracleMode::Kind::Noisy && !(oracle->sigma > 0.0))
        throw std::invalid_argument(id + ": noisy oracle needs sigma > 0");
    if (oracle->kind == OracleMode::Kind::Invalid && !(oracle->rate >= 0.0 && oracle->rate <= 1.0))
        throw std::invalid_argument(id + ": invalid-oracle rate must lie in [0, 1]");
}

json to_json(const ModelSpec& s) {
    json j = {{"id", s.id},
              {"kind", kind_name(s.kind)},
              {"temperature", s.temperature},
              {"max_retries", s.max_retries},
              {"rate_limit", s.rate_limit},
              {"timeout_ms", s.timeout_ms}};
    if (s.is_http()) {
        j["endpoint"] = s.endpoint;
        j["model_name"] = s.model_name;
        j["api_key_env"] = s.api_key_env;
    }
    if (s.oracle) {
        j["oracle"] = oracle_to_json(*s.oracle);
        j["oracle_seed"] = s.oracle_seed;
    }
    return j;
}

ModelSpec model_from_json(const json& j) {
    ModelSpec s;
    s.id = j.at("id").get<std::string>();
    const auto kind = parse_kind(j.at("kind").get<std::string>());
    if (!kind) throw std::invalid_argument(s.id + ": unknown model kind " + j.at("kind").dump());
    s.kind = *kind;
    s.endpoint = j.value("endpoint", std::string{});
    s.model_name = j.value("model_name", std::string{});
    s.api_key_env = j.value("api_key_env", std::string{});
    if (j.contains("api_key")) throw std::invalid_argument(s.id + ": API keys belong in the environment, not the config");
    s.temperature = j.value("temperature", 0.0);
    s.max_retries = j.value("max_retries", 3);
    s.rate_limit = j.value("rate_limit", 60);
    s.timeout_ms = j.value("timeout_ms", 60000);
    if (j.contains("oracle")) s.oracle = oracle_from_json(j.at("oracle"));
    s.oracle_seed = j.value("oracle_seed", std::uint64_t{0});
    s.validate();
    return s;
}

namespace wire {

json request_body(const ModelSpec& spec, const std::string& prompt, const std::string& png_base64) {
    switch (spec.kind) {
        case ModelKind::HttpOpenAi:
            return {{"model", spec.model_name},
                    {"temperature", spec.temperature},
                    {"messages",
                     {{{"role", "user"},
                       {"content",
                        {{{"type", "text"}, {"text", prompt}},
                         {{"type", "image_url"},
                          {"image_url", {{"url", "data:image/png;base64," + png_base64}}}}}}}}}};
        case ModelKind::HttpGemini:
            return {{"contents",
                     {{{"role", "user"},
                       {"parts",
                        {{{"text", prompt}},
                         {{"inline_data", {{"mime_type", "image/png"}, {"data", png_base64}}}}}}}}},
                    {"generationConfig", {{"temperature", spec.temperature}}}};
        case ModelKind::HttpOllama:
            return {{"model", spec.model_name},
                    {"stream", false},
                    {"options", {{"temperature", spec.temperature}}},
                    {"messages", {{{"role", "user"}, {"content", prompt}, {"images", {png_base64}}}}}};
        case ModelKind::Oracle: break;
    }
    throw std::invalid_argument("oracle models have no wire format");
}

std::vector<std::pair<std::string, std::string>> request_headers(const ModelSpec& spec, const std::string& api_key) {
    std::vector<std::pair<std::string, std::string>> h{{"Content-Type", "application/json"}};
    if (api_key.empty()) return h;
    if (spec.kind == ModelKind::HttpGemini)
        h.emplace_back("x-goog-api-key", api_key);
    else
        h.emplace_back("Authorization", "Bearer " + api_key);
    return h;
}

std::string response_text(ModelKind kind, const json& body) {
    try {
        switch (kind) {
            case ModelKind::HttpOpenAi: {
                const json& content = body.at("choices").at(0).at("message").at("content");
                if (content.is_string()) return content.get<std::string>();
                std::string out;
                for (const auto& part : content)
                    if (part.value("type", "") == "text") out += part.at("text").get<std::string>();
                return out;
            }
            case ModelKind::HttpGemini: {
                std::string out;
                for (const auto& part : body.at("candidates").at(0).at("content").at("parts"))
                    if (part.contains("text")) out += part.at("text").get<std::string>();
                return out;
            }
            case ModelKind::HttpOllama: return body.at("message").at("content").get<std::string>();
            case ModelKind::Oracle: break;
        }
    } catch (const json::exception& e) {
        throw GatewayError(GatewayErrorKind::BadResponse, std::string("unexpected response shape: ") + e.what());
    }
    throw GatewayError(GatewayErrorKind::BadResponse, "oracle models have no wire format");
}

}  // namespace wire

std::string oracle_answer(const OracleMode& mode, const AnswerSchema& schema, const GroundTruth& truth, Rng& rng) {
    std::vector<double> v(truth.values().begin(), truth.values().end());
    const std::size_t first = schema.leading_one ? 1 : 0;
    switch (mode.kind) {
        case OracleMode::Kind::Perfect: break;
        case OracleMode::Kind::Invalid:
            if (rng.bernoulli(mode.rate)) return kRefusalText;
            break;
        case OracleMode::Kind::Noisy:
            for (std::size_t i = first; i < v.size(); ++i)
                v[i] = std::clamp(v[i] + mode.sigma * rng.normal(), schema.lo, schema.hi);
            break;
        case OracleMode::Kind::Random:
            for (std::size_t i = first; i < v.size(); ++i) v[i] = rng.uniform(schema.lo, schema.hi);
            break;
    }
    return format_answer(schema, v);
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::string ResponseCache::key(const std::string& model_id, const std::string& stimulus_id,
                               const std::string& prompt_hash, int run_index) {
    return sha256_hex(model_id + "|" + stimulus_id + "|" + prompt_hash + "|" + std::to_string(run_index));
}

std::filesystem::path ResponseCache::path_for(const std::string& key) const {
    return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<RawResponse> ResponseCache::get(const std::string& key) const {
    std::shared_lock lock(mutex_);
    std::ifstream in(path_for(key));
    if (!in) return std::nullopt;
    try {
        return json::parse(in).get<RawResponse>();
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

void ResponseCache::put(const std::string& key, const RawResponse& response) {
    std::unique_lock lock(mutex_);
    const auto target = path_for(key);
    std::filesystem::create_directories(target.parent_path());
    auto tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        json j = response;
        j["from_cache"] = false;
        out << j.dump() << '\n';
        if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

ResponseJournal::ResponseJournal(const std::filesystem::path& file) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    out_.open(file, std::ios::app);
    if (!out_) throw std::runtime_error("cannot open journal " + file.string());
}

void ResponseJournal::append(const RawResponse& response) {
    std::lock_guard lock(mutex_);
    out_ << json(response).dump() << '\n';
    out_.flush();
}

std::vector<RawResponse> ResponseJournal::read(const std::filesystem::path& file) {
    std::vector<RawResponse> out;
    std::ifstream in(file);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        // a torn final line from an interrupted run is skipped
        try {
            out.push_back(json::parse(line).get<RawResponse>());
        } catch (const json::exception&) {
        }
    }
    return out;
}

RateLimiter::RateLimiter(int per_minute, Clock clock) : per_minute_(per_minute), clock_(std::move(clock)) {}

void RateLimiter::acquire() {
    if (per_minute_ <= 0) return;
    constexpr auto window = std::chrono::seconds(60);
    std::unique_lock lock(mutex_);
    for (;;) {
        const auto now = clock_.now();
        while (!recent_.empty() && now - recent_.front() >= window) recent_.pop_front();
        if (static_cast<int>(recent_.size()) < per_minute_) {
            recent_.push_back(now);
            return;
        }
        const auto wait =
            std::chrono::ceil<std::chrono::milliseconds>(recent_.front() + window - now);
        // sleeping under the lock keeps waiters in arrival order
        clock_.sleep(std::max(wait, std::chrono::milliseconds(1)));
    }
}

ModelGateway::ModelGateway(ModelSpec spec, ResponseCache* cache, GatewayEnv env)
    : spec_(std::move(spec)), cache_(cache), env_(std::move(env)) {
    spec_.validate();
    if (spec_.is_http()) {
        url_ = parse_url(spec_.endpoint);
        limiter_ = std::make_unique<RateLimiter>(spec_.rate_limit, env_.clock);
    }
}

std::chrono::milliseconds ModelGateway::backoff_delay(int attempt, Rng& rng) const {
    const double base = static_cast<double>(env_.backoff_base.count()) * std::ldexp(1.0, attempt);
    const double jitter = rng.uniform(-0.2, 0.2);
    return std::chrono::milliseconds(std::llround(base * (1.0 + jitter)));
}

std::string ModelGateway::ask_http(const Stimulus& stimulus, const PromptTemplate& prompt, const std::string& key) {
    if (!url_) throw GatewayError(GatewayErrorKind::MalformedEndpoint, spec_.id + ": bad endpoint " + spec_.endpoint);
    std::string api_key;
    if (!spec_.api_key_env.empty()) {
        const auto v = env_.getenv(spec_.api_key_env);
        if (!v || v->empty())
            throw GatewayError(GatewayErrorKind::Auth, spec_.id + ": " + spec_.api_key_env + " is not set");
        api_key = *v;
    }
    const auto png = encode_image(stimulus.canvas, ImageFormat::Png);
    HttpRequest request{spec_.endpoint, wire::request_headers(spec_, api_key),
                        wire::request_body(spec_, prompt.text, base64_encode(png)).dump(),
                        std::chrono::milliseconds(spec_.timeout_ms)};

    Rng jitter(derive_seed(label_hash(key), label_hash("backoff")));
    std::string last;
    for (int attempt = 0;; ++attempt) {
        limiter_->acquire();
        ++upstream_calls_;
        const HttpResult res = env_.transport->post(request);
        if (res.status == 200) {
            json body;
            try {
                body = json::parse(res.body);
            } catch (const json::exception&) {
                throw GatewayError(GatewayErrorKind::BadResponse, spec_.id + ": response is not JSON");
            }
            return wire::response_text(spec_.kind, body);
        }
        if (res.status == 401 || res.status == 403)
            throw GatewayError(GatewayErrorKind::Auth, spec_.id + ": HTTP " + std::to_string(res.status));
        if (!transient(res.status))
            throw GatewayError(GatewayErrorKind::Rejected,
                               spec_.id + ": HTTP " + std::to_string(res.status) + " " + res.body.substr(0, 200));
        last = res.status == 0 ? res.error : "HTTP " + std::to_string(res.status);
        if (attempt >= spec_.max_retries) break;
        env_.clock.sleep(backoff_delay(attempt, jitter));
    }
    throw GatewayError(GatewayErrorKind::RetriesExhausted,
                       spec_.id + ": gave up after " + std::to_string(spec_.max_retries + 1) + " attempts (" + last + ")");
}

RawResponse ModelGateway::query(const Stimulus& stimulus, const PromptTemplate& prompt, int run_index) {
    if (run_index < 1) throw std::invalid_argument("run_index starts at 1");
    const std::string key = ResponseCache::key(spec_.id, stimulus.id, prompt.hash(), run_index);
    if (cache_) {
        if (auto hit = cache_->get(key)) {
            hit->from_cache = true;
            return *hit;
        }
    }
    RawResponse r;
    r.model_id = spec_.id;
    r.stimulus_id = stimulus.id;
    r.task = task_name(stimulus.task);
    r.run_index = run_index;
    const auto start = std::chrono::steady_clock::now();
    if (spec_.is_http()) {
        r.text = ask_http(stimulus, prompt, key);
    } else {
        ++upstream_calls_;
        const std::uint64_t stream = label_hash(stimulus.id) ^ mix64(static_cast<std::uint64_t>(run_index));
        Rng rng(derive_seed(derive_seed(spec_.oracle_seed, label_hash(spec_.id)), stream));
        r.text = oracle_answer(*spec_.oracle, prompt.schema, stimulus.ground_truth, rng);
    }
    r.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (cache_) cache_->put(key, r);
    return r;
}

BatchResult ModelGateway::run_batch(std::span<const Stimulus> stimuli, const PromptTemplate& prompt, int runs,
                                    int concurrency, ResponseJournal* journal) {
    const std::size_t total = stimuli.size() * static_cast<std::size_t>(std::max(runs, 0));
    std::vector<std::optional<RawResponse>> slots(total);
    std::vector<std::optional<QueryFailure>> failed(total);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i; (i = next++) < total;) {
            const Stimulus& s = stimuli[i / runs];
            const int run = static_cast<int>(i % runs) + 1;
            try {
                RawResponse r = query(s, prompt, run);
                if (journal && !r.from_cache) journal->append(r);
                slots[i] = std::move(r);
            } catch (const GatewayError& e) {
                failed[i] = QueryFailure{s.id, run, e.kind(), e.what()};
            }
        }
    };
    const int n = std::clamp(concurrency, 1, static_cast<int>(std::max<std::size_t>(total, 1)));
    {
        std::vector<std::jthread> pool;
        for (int t = 1; t < n; ++t) pool.emplace_back(worker);
        worker();
    }

    BatchResult out;
    for (std::size_t i = 0; i < total; ++i) {
        if (slots[i]) out.responses.push_back(std::move(*slots[i]));
        if (failed[i]) out.failures.push_back(std::move(*failed[i]));
    }
    return out;
}

}  // namespace gpbench
