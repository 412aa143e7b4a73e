#include "stance/llm_client.hpp"

#include "stance/csv.hpp"
#include "stance/text.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <set>
#include <sstream>
#include <thread>

namespace stance::llm {

using nlohmann::json;

std::string_view to_string(BackendKind kind) {
    return kind == BackendKind::HttpChat ? "http_chat" : "replay";
}

std::optional<BackendKind> parse_backend_kind(std::string_view text) {
    const auto lowered = text::ascii_lower(text);
    if (lowered == "http_chat" || lowered == "http") return BackendKind::HttpChat;
    if (lowered == "replay") return BackendKind::Replay;
    return std::nullopt;
}

std::chrono::milliseconds RetryPolicy::delay_after(int attempt) const {
    if (backoff.empty()) return std::chrono::milliseconds(0);
    const auto k = static_cast<std::size_t>(std::max(attempt, 1) - 1);
    return backoff[std::min(k, backoff.size() - 1)];
}

void BackendConfig::validate() const {
    if (max_concurrency < 1) throw ConfigError("backend.max_concurrency must be >= 1");
    if (retry.max_attempts < 1) throw ConfigError("backend.retry.max_attempts must be >= 1");
    if (kind == BackendKind::HttpChat) {
        if (base_url.empty()) throw ConfigError("http_chat backend requires backend.base_url");
        if (model_name.empty()) throw ConfigError("http_chat backend requires backend.model_name");
        if (api_key_env.empty()) throw ConfigError("http_chat backend requires backend.api_key_env");
    } else if (replay_path.empty()) {
        throw ConfigError("replay backend requires backend.replay_path");
    }
}

// ---------------------------------------------------------------------------
// Replay

ReplayBackend::ReplayBackend(const std::filesystem::path& path) : name_(path.filename().string()) {
    if (!std::filesystem::exists(path)) throw ConfigError("replay file not found: " + path.string());
    const auto table = csv::parse(csv::read_file(path));
    const auto id = table.require("ID", path.string());
    const auto response = table.require("response", path.string());
    for (const auto& row : table.rows) {
        if (row.size() <= std::max(id, response)) {
            throw SchemaError(path.string() + ": short row for ID '" + (row.empty() ? "" : row[0]) + "'");
        }
        responses_.emplace(row[id], row[response]);
    }
}

ReplayBackend::ReplayBackend(std::map<std::string, std::string> responses, std::string name)
    : responses_(responses.begin(), responses.end()), name_(std::move(name)) {}

std::string ReplayBackend::complete(const prompts::RenderedPrompt& prompt) {
    auto it = responses_.find(prompt.record_id);
    if (it == responses_.end()) {
        throw BackendError("replay file has no response for ID '" + prompt.record_id + "'");
    }
    return it->second;
}

std::string ReplayBackend::identity() const { return "replay:" + name_; }

bool ReplayBackend::covers(std::string_view id) const { return responses_.find(id) != responses_.end(); }

// ---------------------------------------------------------------------------
// HTTP chat completions

HttpChatBackend::HttpChatBackend(const BackendConfig& config)
    : model_(config.model_name), temperature_(config.temperature), timeout_(config.timeout) {
    config.validate();
    const char* key = std::getenv(config.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
        throw ConfigError("environment variable " + config.api_key_env + " is not set");
    }
    api_key_ = key;

    std::string url = config.base_url;
    while (!url.empty() && url.back() == '/') url.pop_back();
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("backend.base_url needs a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    scheme_host_port_ = url.substr(0, path_start);
    path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (scheme_host_port_.starts_with("https")) {
        throw ConfigError("this build has no TLS support; use an http:// base_url");
    }
#endif
}

std::string HttpChatBackend::request_body(std::string_view prompt_text) const {
    json body{{"model", model_},
              {"messages", json::array({json{{"role", "user"}, {"content", prompt_text}}})},
              {"temperature", temperature_}};
    return body.dump();
}

std::string HttpChatBackend::complete(const prompts::RenderedPrompt& prompt) {
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    client.set_bearer_token_auth(api_key_);

    const auto result =
        client.Post(path_prefix_ + "/chat/completions", request_body(prompt.text), "application/json");
    if (!result) {
        throw TransientBackendError("request for ID '" + prompt.record_id +
                                    "' failed: " + httplib::to_string(result.error()));
    }
    const int status = result->status;
    if (status == 429 || status >= 500) {
        throw TransientBackendError("HTTP " + std::to_string(status) + " for ID '" + prompt.record_id + "'");
    }
    if (status != 200) {
        throw BackendError("HTTP " + std::to_string(status) + " for ID '" + prompt.record_id +
                           "': " + result->body.substr(0, 200));
    }
    try {
        const auto reply = json::parse(result->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw BackendError("malformed chat completion for ID '" + prompt.record_id + "': " + e.what());
    }
}

std::string HttpChatBackend::identity() const {
    return "http_chat:" + scheme_host_port_ + path_prefix_ + " model=" + model_;
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
    config.validate();
    if (config.kind == BackendKind::HttpChat) return std::make_unique<HttpChatBackend>(config);
    return std::make_unique<ReplayBackend>(config.replay_path);
}

// ---------------------------------------------------------------------------
// predictions.csv

std::string write_predictions_csv(const std::vector<PredictionRecord>& records, bool with_prompt) {
    std::ostringstream out;
    csv::Row header{"ID", "stance_predicted", "stance_label", "parse_status"};
    if (with_prompt) header.emplace_back("tweet_embedded");
    csv::write_row(out, header);
    for (const auto& r : records) {
        csv::Row row{r.id, r.raw_response, std::string(to_string(r.extracted_label)),
                     std::string(parser::to_string(r.parse_status))};
        if (with_prompt) row.push_back(r.prompt_text);
        csv::write_row(out, row);
    }
    return out.str();
}

std::vector<PredictionRecord> read_predictions_csv(std::string_view contents, std::string_view source,
                                                   prompts::PromptKind kind,
                                                   const parser::ParseOptions& parse) {
    const auto table = csv::parse(contents);
    const auto id = table.require("ID", source);
    const auto raw = table.require("stance_predicted", source);
    const auto prompt_col = table.find("tweet_embedded");
    const auto mode = parser::mode_for(kind);

    std::vector<PredictionRecord> records;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (row.size() <= std::max(id, raw)) {
            throw SchemaError(std::string(source) + " row " + std::to_string(i + 2) + ": too few fields");
        }
        if (!seen.insert(row[id]).second) {
            throw DataError(std::string(source) + ": duplicate ID '" + row[id] + "'");
        }
        const auto extraction = parser::extract_label(row[raw], mode, parse);
        PredictionRecord record{row[id], kind, row[raw], extraction.label, extraction.status, {}};
        if (prompt_col && *prompt_col < row.size()) record.prompt_text = row[*prompt_col];
        records.push_back(std::move(record));
    }
    return records;
}

// ---------------------------------------------------------------------------
// Dispatch

RateLimiter::RateLimiter(double requests_per_minute, int burst)
    : rate_per_second_(requests_per_minute / 60.0),
      capacity_(std::max(1, burst)),
      tokens_(std::max(1, burst)),
      last_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
    if (rate_per_second_ <= 0.0) return;
    std::unique_lock lock(mutex_);
    while (true) {
        const auto now = std::chrono::steady_clock::now();
        const double elapsed = std::chrono::duration<double>(now - last_).count();
        tokens_ = std::min(capacity_, tokens_ + elapsed * rate_per_second_);
        last_ = now;
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return;
        }
        const double wait = (1.0 - tokens_) / rate_per_second_;
        lock.unlock();
        std::this_thread::sleep_for(std::chrono::duration<double>(wait));
        lock.lock();
    }
}

namespace {

std::vector<PredictionRecord> load_cache(const std::filesystem::path& out, prompts::PromptKind kind,
                                         const parser::ParseOptions& parse) {
    if (!std::filesystem::exists(out)) return {};
    return read_predictions_csv(csv::read_file(out), out.string(), kind, parse);
}

} // namespace

PredictResult predict_labels(const std::vector<prompts::RenderedPrompt>& prompts, Backend& backend,
                             const BackendConfig& config, const std::filesystem::path& out,
                             const PredictOptions& options) {
    config.validate();
    PredictResult result;

    std::set<std::string> input_ids;
    for (const auto& p : prompts) {
        if (!input_ids.insert(p.record_id).second) {
            throw DataError("duplicate prompt ID '" + p.record_id + "'");
        }
    }
    const auto kind = prompts.empty() ? prompts::PromptKind::ZeroShot : prompts.front().kind;
    const auto mode = parser::mode_for(kind);

    const auto cached = load_cache(out, kind, options.parse);
    std::map<std::string, const PredictionRecord*> cache_index;
    for (const auto& r : cached) cache_index.emplace(r.id, &r);

    std::vector<std::optional<PredictionRecord>> slots(prompts.size());
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        if (auto it = cache_index.find(prompts[i].record_id); it != cache_index.end()) {
            slots[i] = *it->second;
            if (options.keep_prompt_text) slots[i]->prompt_text = prompts[i].text;
            ++result.cache_hits;
        } else {
            pending.push_back(i);
        }
    }

    // Single writer: only this thread touches `out`; workers publish into `slots`.
    std::mutex mutex;
    std::condition_variable progress;
    std::size_t completed = 0;
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> calls{0};
    std::vector<std::pair<std::string, std::string>> failed;

    auto snapshot = [&](bool final_write) {
        std::vector<PredictionRecord> merged;
        for (const auto& slot : slots) {
            if (slot) merged.push_back(*slot);
        }
        for (const auto& r : cached) {
            if (!input_ids.contains(r.id)) merged.push_back(r);
        }
        if (final_write || !merged.empty()) {
            csv::write_file_atomic(out, write_predictions_csv(merged, options.keep_prompt_text));
        }
        return merged;
    };

    const auto sleeper = options.sleep ? options.sleep
                                       : [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    RateLimiter limiter(config.requests_per_minute, config.max_concurrency);

    auto worker = [&] {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= pending.size()) return;
            const auto& prompt = prompts[pending[k]];
            std::optional<PredictionRecord> record;
            std::string last_error;
            for (int attempt = 1; attempt <= config.retry.max_attempts; ++attempt) {
                limiter.acquire();
                ++calls;
                try {
                    std::string raw = backend.complete(prompt);
                    const auto extraction = parser::extract_label(raw, mode, options.parse);
                    record = PredictionRecord{prompt.record_id, prompt.kind, std::move(raw),
                                              extraction.label, extraction.status,
                                              options.keep_prompt_text ? prompt.text : std::string{}};
                    break;
                } catch (const TransientBackendError& e) {
                    last_error = e.what();
                    if (attempt < config.retry.max_attempts) sleeper(config.retry.delay_after(attempt));
                } catch (const std::exception& e) {
                    last_error = e.what();
                    break;
                }
            }
            std::lock_guard lock(mutex);
            if (record) {
                slots[pending[k]] = std::move(record);
            } else {
                failed.emplace_back(prompt.record_id, last_error);
            }
            ++completed;
            progress.notify_one();
        }
    };

    {
        const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.max_concurrency),
                                                   pending.size());
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);

        std::size_t written_at = 0;
        std::unique_lock lock(mutex);
        while (completed < pending.size()) {
            progress.wait(lock, [&] {
                return completed == pending.size() ||
                       completed - written_at >= std::max<std::size_t>(1, options.checkpoint_every);
            });
            if (completed < pending.size()) {
                written_at = completed;
                lock.unlock();
                // Checkpoint so an interrupted run resumes from the cache.
                std::vector<std::optional<PredictionRecord>> copy;
                {
                    std::lock_guard guard(mutex);
                    copy = slots;
                }
                std::vector<PredictionRecord> partial;
                for (const auto& slot : copy) {
                    if (slot) partial.push_back(*slot);
                }
                for (const auto& r : cached) {
                    if (!input_ids.contains(r.id)) partial.push_back(r);
                }
                csv::write_file_atomic(out, write_predictions_csv(partial, options.keep_prompt_text));
                lock.lock();
            }
        }
    }

    std::sort(failed.begin(), failed.end());
    result.failed = std::move(failed);
    result.backend_calls = calls.load();
    if (!pending.empty() || !std::filesystem::exists(out)) {
        result.records = snapshot(true);
    } else {
        // Pure cache hit: leave the file untouched.
        for (auto& slot : slots) result.records.push_back(*slot);
        for (const auto& r : cached) {
            if (!input_ids.contains(r.id)) result.records.push_back(r);
        }
    }
    return result;
}

std::filesystem::path cached_path_for(const std::filesystem::path& predictions_path) {
    auto cached = predictions_path;
    cached.replace_filename(predictions_path.stem().string() + "_cached" +
                            predictions_path.extension().string());
    return cached;
}

void cache_rotate(const std::filesystem::path& predictions_path, CacheAction action) {
    const auto cached = cached_path_for(predictions_path);
    const bool have_live = std::filesystem::exists(predictions_path);
    const bool have_cached = std::filesystem::exists(cached);
    const auto& from = action == CacheAction::Fresh ? predictions_path : cached;
    const auto& to = action == CacheAction::Fresh ? cached : predictions_path;
    const bool have_from = action == CacheAction::Fresh ? have_live : have_cached;
    if (have_live && have_cached) {
        throw Error("both " + predictions_path.string() + " and " + cached.string() +
                    " exist; move one aside manually");
    }
    if (!have_from) return;
    std::filesystem::rename(from, to);
}

// ---------------------------------------------------------------------------
// Cost

std::size_t HeuristicTokenCounter::count(std::string_view text) const { return (text.size() + 3) / 4; }

std::size_t default_completion_allowance(prompts::PromptKind kind) {
    return kind == prompts::PromptKind::Cot ? 256 : 5;
}

CostEstimate estimate_cost(const std::vector<prompts::RenderedPrompt>& prompts,
                           const TokenCounter& counter, double unit_price_per_1k,
                           std::size_t completion_allowance) {
    CostEstimate estimate;
    estimate.unit_price_per_1k = unit_price_per_1k;
    for (const auto& p : prompts) estimate.token_count += counter.count(p.text) + completion_allowance;
    estimate.total = static_cast<double>(estimate.token_count) / 1000.0 * unit_price_per_1k;
    return estimate;
}

} // namespace stance::llm
