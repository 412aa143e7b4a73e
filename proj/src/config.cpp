#include "stance/config.hpp"

#include "stance/csv.hpp"
#include "stance/error.hpp"

#include <set>

namespace stance::app {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    if (p.empty()) return {};
    std::filesystem::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

prompts::PromptKind prompt_kind_or_throw(const std::string& text) {
    auto kind = prompts::parse_prompt_kind(text);
    if (!kind) throw ConfigError("unknown prompt kind '" + text + "' (zero_shot, few_shot, CoT)");
    return *kind;
}

llm::BackendKind backend_kind_or_throw(const std::string& text) {
    auto kind = llm::parse_backend_kind(text);
    if (!kind) throw ConfigError("unknown backend '" + text + "' (http_chat, replay)");
    return *kind;
}

} // namespace

void RunConfig::refresh_replay_path() {
    if (replay_pattern.empty()) return;
    std::string path = replay_pattern;
    const std::string slot = "{prompt}";
    for (auto pos = path.find(slot); pos != std::string::npos; pos = path.find(slot)) {
        path.replace(pos, slot.size(), prompts::to_string(prompt_kind));
    }
    backend.replay_path = path;
}

RunConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j,
                   {"topic", "seed", "paths", "topics", "encoding", "model_type", "prompt_kind", "backend",
                    "pricing", "few_shot_examples", "templates_dir", "parser"},
                   "config");
    RunConfig c;
    c.snapshot = j;
    c.topic = get_or<std::string>(j, "topic", c.topic);
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);

    const json paths = j.value("paths", json::object());
    reject_unknown(paths, {"raw_train", "raw_test", "workdir"}, "paths");
    c.raw_train = resolve(base_dir, get_or<std::string>(paths, "raw_train", ""));
    c.raw_test = resolve(base_dir, get_or<std::string>(paths, "raw_test", ""));
    c.workdir = resolve(base_dir, get_or<std::string>(paths, "workdir", "work"));

    if (j.contains("topics")) {
        c.topics = corpus::TopicMap(get_or<std::map<std::string, std::string>>(j, "topics", {}));
    }

    const json encoding = j.value("encoding", json::object());
    reject_unknown(encoding, {"fallback"}, "encoding");
    const auto fallback = get_or<std::string>(encoding, "fallback", "windows-1252");
    if (fallback == "windows-1252" || fallback == "cp1252") {
        c.fallback_encoding = text::FallbackEncoding::Windows1252;
    } else if (fallback == "none") {
        c.fallback_encoding = text::FallbackEncoding::None;
    } else {
        throw ConfigError("encoding.fallback must be 'windows-1252' or 'none'");
    }

    c.model_type = get_or<std::string>(j, "model_type", c.model_type);
    c.prompt_kind = prompt_kind_or_throw(get_or<std::string>(j, "prompt_kind", "zero_shot"));

    const json backend = j.value("backend", json::object());
    reject_unknown(backend,
                   {"kind", "base_url", "model_name", "api_key_env", "max_concurrency", "requests_per_minute",
                    "temperature", "timeout_seconds", "retry", "replay_path"},
                   "backend");
    auto& b = c.backend;
    b.kind = backend_kind_or_throw(get_or<std::string>(backend, "kind", "replay"));
    b.base_url = get_or<std::string>(backend, "base_url", "");
    b.model_name = get_or<std::string>(backend, "model_name", "");
    b.api_key_env = get_or<std::string>(backend, "api_key_env", b.api_key_env);
    b.max_concurrency = get_or<int>(backend, "max_concurrency", b.max_concurrency);
    b.requests_per_minute = get_or<double>(backend, "requests_per_minute", b.requests_per_minute);
    b.temperature = get_or<double>(backend, "temperature", b.temperature);
    b.timeout = std::chrono::seconds(get_or<int>(backend, "timeout_seconds", static_cast<int>(b.timeout.count())));
    if (backend.contains("retry")) {
        const json& retry = backend.at("retry");
        reject_unknown(retry, {"max_attempts", "backoff_ms"}, "backend.retry");
        b.retry.max_attempts = get_or<int>(retry, "max_attempts", b.retry.max_attempts);
        if (retry.contains("backoff_ms")) {
            b.retry.backoff.clear();
            for (int ms : get_or<std::vector<int>>(retry, "backoff_ms", {})) {
                b.retry.backoff.emplace_back(ms);
            }
        }
    }
    const auto replay = get_or<std::string>(backend, "replay_path", "");
    if (!replay.empty()) c.replay_pattern = resolve(base_dir, replay).string();
    c.refresh_replay_path();

    const json pricing = j.value("pricing", json::object());
    reject_unknown(pricing, {"unit_price_per_1k", "completion_tokens", "token_counter"}, "pricing");
    c.pricing.unit_price_per_1k = get_or<double>(pricing, "unit_price_per_1k", c.pricing.unit_price_per_1k);
    if (pricing.contains("completion_tokens")) {
        const json& completion = pricing.at("completion_tokens");
        reject_unknown(completion, {"single_word", "cot"}, "pricing.completion_tokens");
        c.pricing.completion_single_word =
            get_or<std::size_t>(completion, "single_word", c.pricing.completion_single_word);
        c.pricing.completion_cot = get_or<std::size_t>(completion, "cot", c.pricing.completion_cot);
    }
    c.pricing.token_counter = get_or<std::string>(pricing, "token_counter", c.pricing.token_counter);
    if (c.pricing.token_counter != "heuristic") {
        throw ConfigError("pricing.token_counter: only 'heuristic' is available");
    }

    if (j.contains("few_shot_examples")) {
        c.examples.clear();
        for (const auto& e : j.at("few_shot_examples")) {
            reject_unknown(e, {"tweet", "answer", "source_id"}, "few_shot_examples entry");
            prompts::FewShotExample example{get_or<std::string>(e, "tweet", ""), get_or<std::string>(e, "answer", ""),
                                            std::nullopt};
            if (e.contains("source_id")) example.source_id = get_or<std::string>(e, "source_id", "");
            c.examples.push_back(std::move(example));
        }
    }
    if (j.contains("templates_dir")) c.templates_dir = resolve(base_dir, get_or<std::string>(j, "templates_dir", ""));

    const json parser = j.value("parser", json::object());
    reject_unknown(parser, {"lenient"}, "parser");
    c.lenient_parse = get_or<bool>(parser, "lenient", false);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
    json j;
    try {
        j = json::parse(csv::read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j, std::filesystem::absolute(path).parent_path());
}

void apply_overrides(RunConfig& config, const Overrides& overrides) {
    if (overrides.topic) {
        config.topic = *overrides.topic;
        config.snapshot["topic"] = *overrides.topic;
    }
    if (overrides.prompt) {
        config.prompt_kind = prompt_kind_or_throw(*overrides.prompt);
        config.snapshot["prompt_kind"] = std::string(prompts::to_string(config.prompt_kind));
        config.refresh_replay_path();
    }
    if (overrides.backend) {
        config.backend.kind = backend_kind_or_throw(*overrides.backend);
        config.snapshot["backend"]["kind"] = std::string(llm::to_string(config.backend.kind));
    }
    if (overrides.seed) {
        config.seed = *overrides.seed;
        config.snapshot["seed"] = *overrides.seed;
    }
}

} // namespace stance::app
