#include "stance/metrics.hpp"

#include "stance/csv.hpp"
#include "stance/error.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

namespace stance::metrics {

std::size_t ConfusionMatrix::total() const {
    std::size_t sum = 0;
    for (const auto& row : counts) {
        for (std::size_t c : row) sum += c;
    }
    return sum;
}

std::size_t ConfusionMatrix::row_sum(std::size_t row) const {
    return counts[row][0] + counts[row][1] + counts[row][2];
}

std::size_t ConfusionMatrix::col_sum(std::size_t col) const {
    return counts[0][col] + counts[1][col] + counts[2][col];
}

ConfusionMatrix confusion_matrix(std::span<const StanceLabel> gold, std::span<const StanceLabel> predicted) {
    if (gold.size() != predicted.size()) {
        throw Error("confusion_matrix: " + std::to_string(gold.size()) + " gold labels but " +
                    std::to_string(predicted.size()) + " predictions");
    }
    if (gold.empty()) throw Error("confusion_matrix: no labels to score");
    ConfusionMatrix matrix;
    for (std::size_t i = 0; i < gold.size(); ++i) ++matrix.at(gold[i], predicted[i]);
    return matrix;
}

Percentages normalize(const ConfusionMatrix& matrix, Axis axis) {
    Percentages out{};
    for (std::size_t i = 0; i < 3; ++i) {
        const std::size_t sum = axis == Axis::Row ? matrix.row_sum(i) : matrix.col_sum(i);
        if (sum == 0) continue;
        for (std::size_t j = 0; j < 3; ++j) {
            const std::size_t cell = axis == Axis::Row ? matrix.counts[i][j] : matrix.counts[j][i];
            const double pct = 100.0 * static_cast<double>(cell) / static_cast<double>(sum);
            if (axis == Axis::Row) {
                out[i][j] = pct;
            } else {
                out[j][i] = pct;
            }
        }
    }
    return out;
}

MetricsReport f1_scores(const ConfusionMatrix& matrix) {
    MetricsReport report;
    double sum = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
        const auto tp = static_cast<double>(matrix.counts[c][c]);
        const auto predicted = static_cast<double>(matrix.col_sum(c));
        const auto actual = static_cast<double>(matrix.row_sum(c));
        auto& s = report.per_class[c];
        s.precision = predicted > 0 ? tp / predicted : 0.0;
        s.recall = actual > 0 ? tp / actual : 0.0;
        s.f1 = s.precision + s.recall > 0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
        sum += s.f1;
    }
    report.f1_macro = sum / 3.0;
    return report;
}

Evaluation evaluate_run(const std::vector<ScoredPrediction>& predictions,
                        const std::vector<corpus::Record>& corpus,
                        const std::vector<Partition>& partitions,
                        const std::set<std::string>& exclusions, std::string_view source) {
    std::map<std::string, const ScoredPrediction*, std::less<>> by_id;
    for (const auto& p : predictions) {
        if (!by_id.emplace(p.id, &p).second) throw DataError("duplicate prediction for ID '" + p.id + "'");
    }
    std::set<std::string> corpus_ids;
    for (const auto& r : corpus) corpus_ids.insert(r.id);

    Evaluation evaluation;
    for (const auto& p : predictions) {
        if (!corpus_ids.contains(p.id)) evaluation.unknown_ids.push_back(p.id);
    }

    std::vector<std::string> missing;
    for (Partition partition : partitions) {
        std::vector<StanceLabel> gold;
        std::vector<StanceLabel> predicted;
        PartitionResult result{partition, {}, {}, 0};
        std::size_t fallbacks = 0;
        for (const auto& record : corpus) {
            if (record.partition != partition) continue;
            if (exclusions.contains(record.id)) {
                ++result.excluded;
                continue;
            }
            auto it = by_id.find(record.id);
            if (it == by_id.end()) {
                missing.push_back(record.id);
                continue;
            }
            gold.push_back(record.label);
            predicted.push_back(it->second->label);
            if (it->second->fallback) ++fallbacks;
        }
        if (gold.empty()) {
            if (missing.empty()) {
                throw DataError("partition '" + std::string(to_string(partition)) + "' has no records to score");
            }
            continue;
        }
        result.matrix = confusion_matrix(gold, predicted);
        result.report = f1_scores(result.matrix);
        result.report.partition = std::string(to_string(partition));
        result.report.source = std::string(source);
        result.report.fallback_none_count = fallbacks;
        evaluation.partitions.push_back(result);
    }
    if (!missing.empty()) {
        std::string list;
        for (std::size_t i = 0; i < missing.size(); ++i) list += (i ? ", " : "") + missing[i];
        throw DataError(std::string(source) + ": " + std::to_string(missing.size()) +
                        " records have no prediction: " + list);
    }
    return evaluation;
}

std::vector<ScoredPrediction> read_label_predictions_csv(std::string_view contents, std::string_view source) {
    const auto table = csv::parse(contents);
    const auto id = table.require("ID", source);
    const auto label = table.require("predicted_label", source);
    std::vector<ScoredPrediction> out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::string where = std::string(source) + " row " + std::to_string(i + 2);
        if (row.size() <= std::max(id, label)) throw SchemaError(where + ": too few fields");
        const auto parsed = parse_label(row[label]);
        if (!parsed) throw DataError(where + ": unknown label '" + row[label] + "'");
        out.push_back(ScoredPrediction{row[id], *parsed, false});
    }
    return out;
}

std::string format_double(double value) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
    return std::string(buf, end);
}

std::string write_metrics_csv(const Evaluation& evaluation) {
    std::ostringstream out;
    csv::Row header{"set"};
    for (StanceLabel label : kLabels) {
        const std::string name(to_string(label));
        header.push_back("precision_" + name);
        header.push_back("recall_" + name);
        header.push_back("f1_" + name);
    }
    header.emplace_back("f1_macro");
    header.emplace_back("fallback_none");
    csv::write_row(out, header);
    for (const auto& part : evaluation.partitions) {
        csv::Row row{part.report.partition};
        for (const auto& s : part.report.per_class) {
            row.push_back(format_double(s.precision));
            row.push_back(format_double(s.recall));
            row.push_back(format_double(s.f1));
        }
        row.push_back(format_double(part.report.f1_macro));
        row.push_back(std::to_string(part.report.fallback_none_count));
        csv::write_row(out, row);
    }
    return out.str();
}

std::string write_confusion_csv(const Evaluation& evaluation) {
    std::ostringstream out;
    csv::write_row(out, {"set", "true_label", "predicted_label", "count"});
    for (const auto& part : evaluation.partitions) {
        for (StanceLabel gold : kLabels) {
            for (StanceLabel pred : kLabels) {
                csv::write_row(out, {part.report.partition, std::string(to_string(gold)),
                                     std::string(to_string(pred)), std::to_string(part.matrix.at(gold, pred))});
            }
        }
    }
    return out.str();
}

namespace {

double parse_number(const std::string& text, const std::string& where) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw SchemaError(where + ": not a number: '" + text + "'");
    return value;
}

} // namespace

std::vector<MetricsRow> read_metrics_csv(std::string_view contents, std::string_view source) {
    const auto table = csv::parse(contents);
    const auto set = table.require("set", source);
    std::array<std::array<std::size_t, 3>, 3> cols{};
    for (StanceLabel label : kLabels) {
        const std::string name(to_string(label));
        cols[index_of(label)] = {table.require("precision_" + name, source),
                                 table.require("recall_" + name, source), table.require("f1_" + name, source)};
    }
    const auto macro = table.require("f1_macro", source);
    if (table.rows.empty()) throw SchemaError(std::string(source) + ": no metric rows");

    std::vector<MetricsRow> rows;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        const std::string where = std::string(source) + " row " + std::to_string(i + 2);
        if (r.size() < table.header.size()) throw SchemaError(where + ": too few fields");
        MetricsRow row;
        row.set = r[set];
        for (std::size_t c = 0; c < 3; ++c) {
            row.per_class[c] = {parse_number(r[cols[c][0]], where), parse_number(r[cols[c][1]], where),
                                parse_number(r[cols[c][2]], where)};
        }
        row.f1_macro = parse_number(r[macro], where);
        rows.push_back(row);
    }
    return rows;
}

std::vector<ConfusionSet> read_confusion_csv(std::string_view contents, std::string_view source) {
    const auto table = csv::parse(contents);
    const auto set = table.require("set", source);
    const auto gold = table.require("true_label", source);
    const auto pred = table.require("predicted_label", source);
    const auto count = table.require("count", source);
    std::vector<ConfusionSet> sets;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        const std::string where = std::string(source) + " row " + std::to_string(i + 2);
        if (r.size() < table.header.size()) throw SchemaError(where + ": too few fields");
        const auto g = parse_label(r[gold]);
        const auto p = parse_label(r[pred]);
        if (!g || !p) throw SchemaError(where + ": unknown label");
        auto it = std::find_if(sets.begin(), sets.end(), [&](const ConfusionSet& s) { return s.set == r[set]; });
        if (it == sets.end()) {
            sets.push_back({r[set], {}});
            it = sets.end() - 1;
        }
        const double value = parse_number(r[count], where);
        if (value < 0 || value != static_cast<double>(static_cast<std::size_t>(value))) {
            throw SchemaError(where + ": count must be a non-negative integer");
        }
        it->matrix.at(*g, *p) = static_cast<std::size_t>(value);
    }
    return sets;
}

} // namespace stance::metrics
