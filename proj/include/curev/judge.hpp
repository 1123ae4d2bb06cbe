#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "curev/corpus.hpp"
#include "curev/error.hpp"
#include "curev/labels.hpp"

namespace curev::judge {

enum class PromptKind {
    evaluation,     // judge the original comment
    reformulation,  // rewrite the comment
    reevaluation,   // judge the rewritten comment, relevance omitted
};

std::string_view kind_name(PromptKind kind);
std::optional<PromptKind> parse_kind(std::string_view text);

struct JudgePrompt {
    std::string sample_id;  // routing key for the mock backend; never in the text
    PromptKind kind = PromptKind::evaluation;
    std::string system_text;
    std::string user_text;
};

/// Prompt texts. The user templates carry `{review_comment}` and
/// `{code_diff}` slots; the evaluation template also takes
/// `{relevance_criterion}` and `{output_format}`, the reformulation template
/// `{output_format}`.
struct PromptTemplates {
    std::string version = "curev-prompts-v1";
    std::string system;
    std::string evaluation;
    std::string relevance_criterion;
    std::string reformulation;

    static PromptTemplates defaults();
    /// Replaces defaults with any of system.txt, evaluation.txt,
    /// relevance.txt, reformulation.txt found in `dir`.
    static PromptTemplates load(const std::filesystem::path& dir);
};

/// Substitutes `{name}` slots in one pass; text inserted for a slot is never
/// rescanned. Unknown slots are left untouched.
std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& slots);

/// Wraps `content` in a fence longer than any backtick run inside it.
std::string fenced(std::string_view content, std::string_view info);

JudgePrompt build_evaluation_prompt(const corpus::ReviewSample& sample,
                                    const PromptTemplates& templates = PromptTemplates::defaults());
JudgePrompt build_reformulation_prompt(const corpus::ReviewSample& sample,
                                       const PromptTemplates& templates = PromptTemplates::defaults());
/// Evaluation prompt over `reformulated_comment` with the relevance criterion
/// and the RELEVANCE output key removed.
JudgePrompt build_reevaluation_prompt(const corpus::ReviewSample& sample, std::string_view reformulated_comment,
                                      const PromptTemplates& templates = PromptTemplates::defaults());

struct PromptSlots {
    std::string review_comment;
    std::string code_diff;
};

/// Recovers the comment and diff embedded in a built prompt.
std::optional<PromptSlots> extract_prompt_slots(std::string_view user_text);

struct JudgeConfig {
    std::string endpoint = "http://127.0.0.1:8000/v1/chat/completions";
    std::string model = "Llama-3.1-70B-Instruct";
    double temperature = 0.0;
    int max_retries = 3;        // transport retries after the first attempt
    int max_parse_retries = 1;  // extra completions requested when a reply fails to parse
    int max_parallel = 4;
    std::chrono::milliseconds timeout{120000};
    std::chrono::milliseconds initial_backoff{500};
    std::chrono::milliseconds max_backoff{30000};

    /// Throws JudgeConfigError when a bound is violated.
    void validate() const;
    static JudgeConfig from_json(const nlohmann::json& j);
};

class JudgeConfigError : public Error {
public:
    explicit JudgeConfigError(const std::string& what) : Error("config", what) {}
};

/// One failed backend call.
class TransportError : public Error {
public:
    TransportError(const std::string& what, bool retryable, bool timeout = false, int status = 0,
                   std::optional<std::chrono::milliseconds> retry_after = std::nullopt)
        : Error("judge", what), retryable_(retryable), timeout_(timeout), status_(status), retry_after_(retry_after) {}

    bool retryable() const noexcept { return retryable_; }
    bool timeout() const noexcept { return timeout_; }
    int status() const noexcept { return status_; }
    std::optional<std::chrono::milliseconds> retry_after() const noexcept { return retry_after_; }

private:
    bool retryable_;
    bool timeout_;
    int status_;
    std::optional<std::chrono::milliseconds> retry_after_;
};

class BackendUnavailable : public Error {
public:
    BackendUnavailable(const std::string& last_cause, int attempts)
        : Error("judge", "backend unavailable after " + std::to_string(attempts) + " attempt(s): " + last_cause),
          last_cause_(last_cause),
          attempts_(attempts) {}
    const std::string& last_cause() const noexcept { return last_cause_; }
    int attempts() const noexcept { return attempts_; }

private:
    std::string last_cause_;
    int attempts_;
};

class JudgeTimeout : public Error {
public:
    JudgeTimeout(const std::string& what, int attempts)
        : Error("judge", "timeout after " + std::to_string(attempts) + " attempt(s): " + what), attempts_(attempts) {}
    int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

struct BackendResponse {
    std::string raw_text;
    int attempt_index = 0;  // 0-based index of the attempt that succeeded
    std::chrono::milliseconds latency{0};
};

/// Completion source. Implementations must be callable from several threads
/// at once and report failures as TransportError.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string send(const JudgePrompt& prompt, const JudgeConfig& config) = 0;
};

/// Serves `<dir>/<sample_id>.<kind>.txt`. A missing fixture is a
/// non-retryable failure.
class MockBackend final : public Backend {
public:
    explicit MockBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}
    std::string send(const JudgePrompt& prompt, const JudgeConfig& config) override;

    static std::filesystem::path fixture_path(const std::filesystem::path& dir, std::string_view sample_id,
                                              PromptKind kind);

private:
    std::filesystem::path dir_;
};

/// Chat-completion client: POSTs {model, messages, temperature} to the
/// endpoint and reads choices[0].message.content. Sends
/// `Authorization: Bearer $CUREV_API_KEY` when the variable is set. HTTP 429
/// and 5xx are retryable; other statuses are not.
class RemoteBackend final : public Backend {
public:
    RemoteBackend() = default;
    explicit RemoteBackend(std::optional<std::string> api_key) : api_key_(std::move(api_key)), key_overridden_(true) {}
    std::string send(const JudgePrompt& prompt, const JudgeConfig& config) override;

    static nlohmann::json request_body(const JudgePrompt& prompt, const JudgeConfig& config);

private:
    std::optional<std::string> api_key_;
    bool key_overridden_ = false;
};

using SleepFn = std::function<void(std::chrono::milliseconds)>;

/// Delay before retry number `retry` (0-based): initial * 2^retry, capped.
std::chrono::milliseconds backoff_delay(const JudgeConfig& config, int retry);

/// Returns the first successful completion, retrying retryable transport
/// failures up to config.max_retries times with exponential backoff (or the
/// server's Retry-After, whichever is longer, still capped). Throws
/// BackendUnavailable or JudgeTimeout when every attempt fails.
BackendResponse complete(Backend& backend, const JudgePrompt& prompt, const JudgeConfig& config,
                         const SleepFn& sleep = {});

/// Runs task(i) for every i in [0, count) on at most `max_parallel` threads.
/// Exceptions escaping a task are rethrown after all workers finish.
void for_each_bounded(std::size_t count, int max_parallel, const std::function<void(std::size_t)>& task);

struct JudgedRecord {
    std::string id;
    Judgment judgment;
};

struct FailedSample {
    std::string id;
    std::string error;
    int attempts = 0;
    std::string stage;  // "evaluation", "reformulation", "reevaluation"
};

struct JudgeRun {
    std::vector<JudgedRecord> judged;  // ascending id
    std::vector<FailedSample> failed;  // ascending id
};

/// Evaluates every sample, one call per sample, at most max_parallel in flight.
/// A reply that fails to parse is requested again up to max_parse_retries
/// times; samples that still fail land in `failed`.
JudgeRun judge_corpus(const corpus::Corpus& corpus, Backend& backend, const JudgeConfig& config,
                      const PromptTemplates& templates = PromptTemplates::defaults(), const SleepFn& sleep = {});

nlohmann::json judged_to_json(const JudgedRecord& record);
JudgedRecord judged_from_json(const nlohmann::json& j);
nlohmann::json failed_to_json(const FailedSample& failed);

std::vector<JudgedRecord> load_judged(const std::filesystem::path& path);
void save_judged(const std::filesystem::path& path, const std::vector<JudgedRecord>& records);
void save_failed(const std::filesystem::path& path, const std::vector<FailedSample>& failed);

}  // namespace curev::judge
