#pragma once

#include "stance/config.hpp"
#include "stance/label.hpp"
#include "stance/llm_client.hpp"
#include "stance/metrics.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stance::app {

struct PreprocessSummary {
    std::size_t train_loaded = 0;
    std::size_t test_loaded = 0;
    std::size_t train_duplicates = 0;
    std::size_t test_duplicates = 0;
    std::size_t lines_reencoded = 0;
    std::vector<corpus::Record> records;
};

/// Writes <workdir>/corpus/<topic>/{processed.csv,partitions.csv,preprocess_log.json}.
PreprocessSummary cmd_preprocess(const RunConfig& config, std::ostream& out, std::ostream& log);

std::vector<corpus::Record> load_corpus(const RunConfig& config);

/// Prompts for VALI and TEST in corpus order. FEW_SHOT drops leaked IDs.
std::vector<prompts::RenderedPrompt> build_run_prompts(const RunConfig& config,
                                                       const std::vector<corpus::Record>& corpus);

llm::CostEstimate cmd_estimate_cost(const RunConfig& config, std::ostream& out);

struct PredictFlags {
    /// Rotate an existing predictions.csv to predictions_cached.csv and query afresh.
    bool fresh = false;
    /// Move predictions_cached.csv back before running (reuse published results).
    bool restore_cached = false;
};

/// Throws BackendError listing IDs that still failed after retries.
llm::PredictResult cmd_predict(const RunConfig& config, const PredictFlags& flags, std::ostream& log,
                               llm::Backend* backend_override = nullptr);

struct EvaluateFlags {
    /// Evaluate this directory instead of the configured run.
    std::optional<std::filesystem::path> run_dir;
    std::vector<Partition> partitions{Partition::Vali, Partition::Test};
};

metrics::Evaluation cmd_evaluate(const RunConfig& config, const EvaluateFlags& flags, std::ostream& out,
                                 std::ostream& log);

struct SummarizeFlags {
    /// Explicit run directories; empty means every <workdir>/*/*/metrics.csv.
    std::vector<std::filesystem::path> runs;
    std::vector<std::string> sets;
};

std::vector<metrics::SummaryRow> cmd_summarize(const RunConfig& config, const SummarizeFlags& flags,
                                               std::ostream& out);

/// Merges `patch` into <run_dir>/manifest.json. The file is rewritten only when
/// something other than the timestamps changes.
void update_manifest(const std::filesystem::path& run_dir, const nlohmann::json& patch);

} // namespace stance::app
