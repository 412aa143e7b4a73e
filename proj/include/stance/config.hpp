#pragma once

#include "stance/corpus.hpp"
#include "stance/llm_client.hpp"
#include "stance/prompts.hpp"
#include "stance/text.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace stance::app {

struct Pricing {
    double unit_price_per_1k = 0.002;
    std::size_t completion_single_word = 5;
    std::size_t completion_cot = 256;
    /// Only "heuristic" is built in.
    std::string token_counter = "heuristic";

    std::size_t allowance_for(prompts::PromptKind kind) const {
        return kind == prompts::PromptKind::Cot ? completion_cot : completion_single_word;
    }
};

/// Everything a subcommand needs. Relative paths are resolved against the config
/// file's directory. Run artifacts live in <workdir>/<model_type>/<prompt_kind>/.
struct RunConfig {
    std::string topic = "Abortion";
    std::uint64_t seed = 42;
    std::filesystem::path raw_train;
    std::filesystem::path raw_test;
    std::filesystem::path workdir;
    corpus::TopicMap topics;
    text::FallbackEncoding fallback_encoding = text::FallbackEncoding::Windows1252;

    std::string model_type = "chatgpt_turbo_3_5";
    prompts::PromptKind prompt_kind = prompts::PromptKind::ZeroShot;
    llm::BackendConfig backend;
    /// May contain "{prompt}", replaced by the prompt kind name.
    std::string replay_pattern;
    Pricing pricing;
    std::vector<prompts::FewShotExample> examples = prompts::default_examples();
    std::optional<std::filesystem::path> templates_dir;
    bool lenient_parse = false;

    /// The parsed config file, recorded in run manifests.
    nlohmann::json snapshot;

    std::filesystem::path corpus_dir() const { return workdir / "corpus" / topic; }
    std::filesystem::path corpus_csv() const { return corpus_dir() / "processed.csv"; }
    std::filesystem::path partitions_csv() const { return corpus_dir() / "partitions.csv"; }
    std::filesystem::path run_dir() const {
        return workdir / model_type / std::string(prompts::to_string(prompt_kind));
    }
    std::filesystem::path summary_dir() const { return workdir / "summary"; }

    /// Re-resolves backend.replay_path from replay_pattern for the current prompt kind.
    void refresh_replay_path();
};

struct Overrides {
    std::optional<std::string> topic;
    std::optional<std::string> prompt;
    std::optional<std::string> backend;
    std::optional<std::uint64_t> seed;
};

RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);
void apply_overrides(RunConfig& config, const Overrides& overrides);

} // namespace stance::app
