#pragma once

#include "stance/corpus.hpp"
#include "stance/label.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stance::metrics {

/// Rows are gold labels, columns predicted labels, both in canonical order.
struct ConfusionMatrix {
    std::array<std::array<std::size_t, 3>, 3> counts{};

    std::size_t total() const;
    std::size_t row_sum(std::size_t row) const;
    std::size_t col_sum(std::size_t col) const;
    std::size_t& at(StanceLabel gold, StanceLabel predicted) {
        return counts[index_of(gold)][index_of(predicted)];
    }
    std::size_t at(StanceLabel gold, StanceLabel predicted) const {
        return counts[index_of(gold)][index_of(predicted)];
    }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Throws Error on length mismatch or empty input.
ConfusionMatrix confusion_matrix(std::span<const StanceLabel> gold, std::span<const StanceLabel> predicted);

enum class Axis { Row, Column };

using Percentages = std::array<std::array<double, 3>, 3>;

/// Scales each row (or column) to sum to 100; an all-zero row (column) stays zero.
Percentages normalize(const ConfusionMatrix& matrix, Axis axis);

struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct MetricsReport {
    std::array<ClassScores, 3> per_class{};
    double f1_macro = 0.0;
    std::string partition;
    std::string source;
    std::size_t fallback_none_count = 0;

    const ClassScores& of(StanceLabel label) const { return per_class[index_of(label)]; }
};

/// Per-class P/R/F1 with 0/0 := 0, and their unweighted mean.
MetricsReport f1_scores(const ConfusionMatrix& matrix);

/// A prediction reduced to what scoring needs.
struct ScoredPrediction {
    std::string id;
    StanceLabel label;
    bool fallback = false;
};

struct PartitionResult {
    Partition partition;
    ConfusionMatrix matrix;
    MetricsReport report;
    std::size_t excluded = 0;
};

struct Evaluation {
    std::vector<PartitionResult> partitions;
    /// Prediction IDs not present in the corpus (ignored).
    std::vector<std::string> unknown_ids;
};

/// Scores `predictions` against the gold labels of the requested partitions, skipping
/// `exclusions`. Throws DataError listing every in-scope ID without a prediction.
Evaluation evaluate_run(const std::vector<ScoredPrediction>& predictions,
                        const std::vector<corpus::Record>& corpus,
                        const std::vector<Partition>& partitions,
                        const std::set<std::string>& exclusions, std::string_view source);

/// Encoder-style predictions: "ID,predicted_label" with AGAINST/FAVOR/NONE labels.
std::vector<ScoredPrediction> read_label_predictions_csv(std::string_view contents, std::string_view source);

/// "set,precision_AGAINST,recall_AGAINST,f1_AGAINST,...,f1_macro,fallback_none".
std::string write_metrics_csv(const Evaluation& evaluation);
/// Long form "set,true_label,predicted_label,count".
std::string write_confusion_csv(const Evaluation& evaluation);

struct MetricsRow {
    std::string set;
    std::array<ClassScores, 3> per_class{};
    double f1_macro = 0.0;
};

/// Reads metrics.csv; the fallback_none column is optional.
std::vector<MetricsRow> read_metrics_csv(std::string_view contents, std::string_view source);

struct ConfusionSet {
    std::string set;
    ConfusionMatrix matrix;
};
std::vector<ConfusionSet> read_confusion_csv(std::string_view contents, std::string_view source);

/// Three heatmaps per set: counts, row-normalized and column-normalized percentages.
std::string render_confusion_svg(const std::vector<ConfusionSet>& sets, std::string_view title);

struct RunInfo {
    std::filesystem::path dir;
    std::string model_type;
    std::string prompt_type;

    std::string name() const;
};

/// model_type/prompt_type from <dir>/manifest.json when present, otherwise from the
/// <model_type>/<prompt_type> directory layout.
RunInfo describe_run(const std::filesystem::path& dir);

struct SummaryRow {
    std::string model_type;
    std::string prompt_type;
    std::string partition;
    double f1_macro = 0.0;
    double f1_none = 0.0;
    double f1_favor = 0.0;
    double f1_against = 0.0;
    std::string run;
};

/// One row per (run, set), sorted by f1_macro descending, then run name, then set.
/// Throws SchemaError naming the run when metrics.csv is missing or malformed.
std::vector<SummaryRow> summarize_runs(const std::vector<RunInfo>& runs,
                                       const std::vector<std::string>& only_sets = {});

/// "model_type,prompt_type,partition,f1_macro,f1_NONE,f1_FAVOR,f1_AGAINST" with 6 decimals.
std::string write_summary_csv(const std::vector<SummaryRow>& rows);

/// Shortest decimal that round-trips.
std::string format_double(double value);
/// Fixed number of decimals.
std::string format_fixed(double value, int decimals);

} // namespace stance::metrics
