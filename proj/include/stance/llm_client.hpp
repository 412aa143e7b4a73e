#pragma once

#include "stance/error.hpp"
#include "stance/label.hpp"
#include "stance/parser.hpp"
#include "stance/prompts.hpp"

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stance::llm {

enum class BackendKind { HttpChat, Replay };

std::string_view to_string(BackendKind kind);
std::optional<BackendKind> parse_backend_kind(std::string_view text);

struct RetryPolicy {
    int max_attempts = 3;
    /// Delay before attempt k+1 is backoff[min(k-1, size-1)].
    std::vector<std::chrono::milliseconds> backoff{std::chrono::milliseconds(1000),
                                                   std::chrono::milliseconds(2000),
                                                   std::chrono::milliseconds(4000)};

    std::chrono::milliseconds delay_after(int attempt) const;
};

struct BackendConfig {
    BackendKind kind = BackendKind::Replay;
    std::string base_url;
    std::string model_name;
    std::string api_key_env = "LLM_API_KEY";
    int max_concurrency = 4;
    /// 0 disables request-rate throttling.
    double requests_per_minute = 0.0;
    double temperature = 0.0;
    std::chrono::seconds timeout{60};
    RetryPolicy retry;
    std::filesystem::path replay_path;

    /// Throws ConfigError when a required field for `kind` is missing.
    void validate() const;
};

/// Retryable failure: connection error, timeout, HTTP 429 or 5xx.
class TransientBackendError : public BackendError {
public:
    using BackendError::BackendError;
};

class Backend {
public:
    virtual ~Backend() = default;
    /// Returns the raw response text. Throws TransientBackendError for failures worth
    /// retrying and BackendError for permanent ones.
    virtual std::string complete(const prompts::RenderedPrompt& prompt) = 0;
    /// Short description recorded in run manifests.
    virtual std::string identity() const = 0;
};

/// Canned responses from a "ID,response" CSV.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(const std::filesystem::path& path);
    explicit ReplayBackend(std::map<std::string, std::string> responses, std::string name = "inline");

    std::string complete(const prompts::RenderedPrompt& prompt) override;
    std::string identity() const override;

    bool covers(std::string_view id) const;

private:
    std::map<std::string, std::string, std::less<>> responses_;
    std::string name_;
};

/// OpenAI-compatible POST <base_url>/chat/completions, one user message per prompt.
class HttpChatBackend : public Backend {
public:
    /// Reads the bearer token from config.api_key_env; throws ConfigError when unset.
    explicit HttpChatBackend(const BackendConfig& config);

    std::string complete(const prompts::RenderedPrompt& prompt) override;
    std::string identity() const override;

    /// JSON request body for one prompt.
    std::string request_body(std::string_view prompt_text) const;

private:
    std::string scheme_host_port_;
    std::string path_prefix_;
    std::string model_;
    std::string api_key_;
    double temperature_;
    std::chrono::seconds timeout_;
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config);

struct PredictionRecord {
    std::string id;
    prompts::PromptKind prompt_kind;
    std::string raw_response;
    StanceLabel extracted_label;
    parser::ParseStatus parse_status;
    /// Prompt text, written to the optional tweet_embedded column.
    std::string prompt_text;
};

/// predictions.csv: "ID,stance_predicted,stance_label,parse_status[,tweet_embedded]".
std::string write_predictions_csv(const std::vector<PredictionRecord>& records, bool with_prompt);

/// Accepts any file with ID and stance_predicted columns; labels are re-derived from the
/// raw response under `kind`'s parse mode.
std::vector<PredictionRecord> read_predictions_csv(std::string_view contents, std::string_view source,
                                                   prompts::PromptKind kind,
                                                   const parser::ParseOptions& parse = {});

/// Token-bucket throttle shared by all dispatch workers.
class RateLimiter {
public:
    /// requests_per_minute <= 0 disables throttling.
    RateLimiter(double requests_per_minute, int burst);
    void acquire();

private:
    std::mutex mutex_;
    double rate_per_second_;
    double capacity_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
};

struct PredictOptions {
    bool keep_prompt_text = false;
    parser::ParseOptions parse;
    /// Rewrite the predictions file after this many fresh completions.
    std::size_t checkpoint_every = 50;
    /// Injected in tests to avoid real backoff sleeps.
    std::function<void(std::chrono::milliseconds)> sleep;
};

struct PredictResult {
    std::vector<PredictionRecord> records;
    std::size_t cache_hits = 0;
    std::size_t backend_calls = 0;
    /// IDs that still failed after max_attempts, with the last error message.
    std::vector<std::pair<std::string, std::string>> failed;
};

/// Runs every prompt not already in `out` through `backend` with up to
/// config.max_concurrency requests in flight, then writes `out` in input order
/// (cached records for IDs outside `prompts` are kept after them).
PredictResult predict_labels(const std::vector<prompts::RenderedPrompt>& prompts, Backend& backend,
                             const BackendConfig& config, const std::filesystem::path& out,
                             const PredictOptions& options = {});

enum class CacheAction {
    /// About to query a live backend: predictions.csv -> predictions_cached.csv.
    Fresh,
    /// Reusing published results: predictions_cached.csv -> predictions.csv.
    Restore,
};

std::filesystem::path cached_path_for(const std::filesystem::path& predictions_path);

/// Throws Error when the rename target already exists.
void cache_rotate(const std::filesystem::path& predictions_path, CacheAction action);

class TokenCounter {
public:
    virtual ~TokenCounter() = default;
    virtual std::size_t count(std::string_view text) const = 0;
    virtual std::string name() const = 0;
};

/// ceil(bytes / 4).
class HeuristicTokenCounter : public TokenCounter {
public:
    std::size_t count(std::string_view text) const override;
    std::string name() const override { return "heuristic-bytes/4"; }
};

struct CostEstimate {
    std::size_t token_count = 0;
    double unit_price_per_1k = 0.0;
    double total = 0.0;
};

/// 5 tokens for single-word answers, 256 for chain-of-thought.
std::size_t default_completion_allowance(prompts::PromptKind kind);

CostEstimate estimate_cost(const std::vector<prompts::RenderedPrompt>& prompts,
                           const TokenCounter& counter, double unit_price_per_1k,
                           std::size_t completion_allowance);

} // namespace stance::llm
