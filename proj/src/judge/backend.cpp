#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "curev/judge.hpp"
#include "curev/jsonl.hpp"
#include "curev/label_json.hpp"
#include "curev/parse.hpp"

namespace curev::judge {

using nlohmann::json;

void JudgeConfig::validate() const {
    if (max_retries < 0) throw JudgeConfigError("max_retries must be >= 0");
    if (max_parse_retries < 0) throw JudgeConfigError("max_parse_retries must be >= 0");
    if (max_parallel < 1) throw JudgeConfigError("max_parallel must be >= 1");
    if (!(temperature >= 0.0)) throw JudgeConfigError("temperature must be >= 0");
    if (timeout.count() <= 0) throw JudgeConfigError("timeout must be positive");
    if (initial_backoff.count() < 0 || max_backoff.count() < 0) throw JudgeConfigError("backoff must be >= 0");
}

JudgeConfig JudgeConfig::from_json(const json& j) {
    JudgeConfig c;
    if (!j.is_object()) throw JudgeConfigError("judge config must be an object");
    c.endpoint = j.value("endpoint", c.endpoint);
    c.model = j.value("model", c.model);
    c.temperature = j.value("temperature", c.temperature);
    c.max_retries = j.value("max_retries", c.max_retries);
    c.max_parse_retries = j.value("max_parse_retries", c.max_parse_retries);
    c.max_parallel = j.value("max_parallel", c.max_parallel);
    c.timeout = std::chrono::milliseconds(j.value("timeout_ms", static_cast<long long>(c.timeout.count())));
    c.initial_backoff =
        std::chrono::milliseconds(j.value("initial_backoff_ms", static_cast<long long>(c.initial_backoff.count())));
    c.max_backoff = std::chrono::milliseconds(j.value("max_backoff_ms", static_cast<long long>(c.max_backoff.count())));
    c.validate();
    return c;
}

std::filesystem::path MockBackend::fixture_path(const std::filesystem::path& dir, std::string_view sample_id,
                                                PromptKind kind) {
    return dir / (std::string(sample_id) + "." + std::string(kind_name(kind)) + ".txt");
}

std::string MockBackend::send(const JudgePrompt& prompt, const JudgeConfig&) {
    const auto path = fixture_path(dir_, prompt.sample_id, prompt.kind);
    try {
        return jsonl::read_text(path);
    } catch (const IoError&) {
        throw TransportError("mock fixture missing: " + path.string(), false);
    }
}

namespace {

struct Endpoint {
    std::string base;  // scheme://host[:port]
    std::string path;
};

Endpoint split_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw JudgeConfigError("endpoint needs a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::optional<std::chrono::milliseconds> parse_retry_after(const httplib::Result& res) {
    if (!res->has_header("Retry-After")) return std::nullopt;
    const auto value = res->get_header_value("Retry-After");
    char* end = nullptr;
    const double seconds = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || seconds < 0) return std::nullopt;
    return std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
}

}  // namespace

json RemoteBackend::request_body(const JudgePrompt& prompt, const JudgeConfig& config) {
    json messages = json::array();
    if (!prompt.system_text.empty()) messages.push_back({{"role", "system"}, {"content", prompt.system_text}});
    messages.push_back({{"role", "user"}, {"content", prompt.user_text}});
    return json{{"model", config.model}, {"messages", messages}, {"temperature", config.temperature}};
}

std::string RemoteBackend::send(const JudgePrompt& prompt, const JudgeConfig& config) {
    const auto endpoint = split_endpoint(config.endpoint);
    httplib::Client client(endpoint.base);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    std::optional<std::string> key = api_key_;
    if (!key_overridden_) {
        if (const char* env = std::getenv("CUREV_API_KEY"); env && *env) key = env;
    }
    httplib::Headers headers;
    if (key) headers.emplace("Authorization", "Bearer " + *key);

    const auto body = request_body(prompt, config).dump();
    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(endpoint.path, headers, body, "application/json");
    if (!res) {
        const auto err = res.error();
        // httplib reports a read timeout as a plain Read error.
        const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                               (err == httplib::Error::Read &&
                                std::chrono::steady_clock::now() - started >= config.timeout);
        throw TransportError("transport error: " + httplib::to_string(err), true, timed_out);
    }
    if (res->status == 429 || res->status >= 500)
        throw TransportError("HTTP " + std::to_string(res->status), true, false, res->status, parse_retry_after(res));
    if (res->status != 200)
        throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200), false, false,
                             res->status);

    try {
        const auto reply = json::parse(res->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw TransportError(std::string("malformed completion body: ") + e.what(), false, false, res->status);
    }
}

std::chrono::milliseconds backoff_delay(const JudgeConfig& config, int retry) {
    auto delay = config.initial_backoff;
    for (int i = 0; i < retry && delay < config.max_backoff; ++i) delay *= 2;
    return std::min(delay, config.max_backoff);
}

BackendResponse complete(Backend& backend, const JudgePrompt& prompt, const JudgeConfig& config, const SleepFn& sleep) {
    config.validate();
    const auto pause = [&](std::chrono::milliseconds d) {
        if (d.count() <= 0) return;
        if (sleep) {
            sleep(d);
        } else {
            std::this_thread::sleep_for(d);
        }
    };

    std::string last_cause;
    bool last_was_timeout = false;
    int attempts = 0;
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        const auto start = std::chrono::steady_clock::now();
        ++attempts;
        try {
            auto text = backend.send(prompt, config);
            const auto elapsed = std::chrono::steady_clock::now() - start;
            return {std::move(text), attempt, std::chrono::duration_cast<std::chrono::milliseconds>(elapsed)};
        } catch (const TransportError& e) {
            last_cause = e.what();
            last_was_timeout = e.timeout();
            if (!e.retryable()) break;
            if (attempt == config.max_retries) break;
            auto delay = backoff_delay(config, attempt);
            if (auto hint = e.retry_after()) delay = std::min(std::max(delay, *hint), config.max_backoff);
            pause(delay);
        }
    }
    if (last_was_timeout) throw JudgeTimeout(last_cause, attempts);
    throw BackendUnavailable(last_cause, attempts);
}

void for_each_bounded(std::size_t count, int max_parallel, const std::function<void(std::size_t)>& task) {
    if (count == 0) return;
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, max_parallel)), count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto run = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
        run();
    }
    if (first_error) std::rethrow_exception(first_error);
}

JudgeRun judge_corpus(const corpus::Corpus& corpus, Backend& backend, const JudgeConfig& config,
                      const PromptTemplates& templates, const SleepFn& sleep) {
    config.validate();
    const auto& samples = corpus.samples();
    std::vector<std::optional<Judgment>> results(samples.size());
    std::vector<std::optional<FailedSample>> failures(samples.size());

    for_each_bounded(samples.size(), config.max_parallel, [&](std::size_t i) {
        const auto prompt = build_evaluation_prompt(samples[i], templates);
        int attempts = 0;
        std::string error;
        for (int round = 0; round <= config.max_parse_retries; ++round) {
            try {
                auto response = complete(backend, prompt, config, sleep);
                attempts += response.attempt_index + 1;
                results[i] = parse::parse_judgment(response.raw_text);
                return;
            } catch (const parse::ParseError& e) {
                error = e.what();
            } catch (const BackendUnavailable& e) {
                attempts += e.attempts();
                error = e.what();
                break;
            } catch (const JudgeTimeout& e) {
                attempts += e.attempts();
                error = e.what();
                break;
            }
        }
        failures[i] = FailedSample{samples[i].id, error, attempts, "evaluation"};
    });

    JudgeRun run;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (results[i]) run.judged.push_back({samples[i].id, std::move(*results[i])});
        if (failures[i]) run.failed.push_back(std::move(*failures[i]));
    }
    return run;
}

json judged_to_json(const JudgedRecord& record) {
    return json{{"id", record.id}, {"judgment", judgment_to_json(record.judgment)}};
}

JudgedRecord judged_from_json(const json& j) {
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) throw SchemaError("id", "missing");
    if (!j.contains("judgment")) throw SchemaError("judgment", "missing");
    return {j["id"].get<std::string>(), judgment_from_json(j["judgment"])};
}

json failed_to_json(const FailedSample& f) {
    json j{{"id", f.id}, {"error", f.error}, {"attempts", f.attempts}};
    if (!f.stage.empty()) j["stage"] = f.stage;
    return j;
}

std::vector<JudgedRecord> load_judged(const std::filesystem::path& path) {
    std::vector<JudgedRecord> out;
    for (const auto& j : jsonl::read(path)) out.push_back(judged_from_json(j));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

void save_judged(const std::filesystem::path& path, const std::vector<JudgedRecord>& records) {
    std::vector<json> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(judged_to_json(r));
    jsonl::write(path, out);
}

void save_failed(const std::filesystem::path& path, const std::vector<FailedSample>& failed) {
    std::vector<json> out;
    for (const auto& f : failed) out.push_back(failed_to_json(f));
    jsonl::write(path, out);
}

}  // namespace curev::judge
