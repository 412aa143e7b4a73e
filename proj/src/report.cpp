#include "stance/csv.hpp"
#include "stance/error.hpp"
#include "stance/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace stance::metrics {
namespace {

constexpr int kCell = 64;
constexpr int kPanelGap = 40;
constexpr int kLabelWidth = 80;

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

// Light-to-dark blue ramp over [0, 1].
std::string shade(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(247 - t * (247 - 8));
    const int g = static_cast<int>(251 - t * (251 - 48));
    const int b = static_cast<int>(255 - t * (255 - 107));
    std::ostringstream out;
    out << "rgb(" << r << ',' << g << ',' << b << ')';
    return out.str();
}

void panel(std::ostringstream& svg, int x0, int y0, std::string_view title,
           const std::array<std::array<double, 3>, 3>& values, double scale, bool percent) {
    svg << "  <text x=\"" << x0 + kLabelWidth + kCell * 3 / 2 << "\" y=\"" << y0 - 28
        << "\" text-anchor=\"middle\" font-weight=\"bold\">" << xml_escape(title) << "</text>\n";
    for (std::size_t j = 0; j < 3; ++j) {
        svg << "  <text x=\"" << x0 + kLabelWidth + static_cast<int>(j) * kCell + kCell / 2 << "\" y=\""
            << y0 - 8 << "\" text-anchor=\"middle\" font-size=\"11\">" << to_string(kLabels[j]) << "</text>\n";
    }
    for (std::size_t i = 0; i < 3; ++i) {
        const int y = y0 + static_cast<int>(i) * kCell;
        svg << "  <text x=\"" << x0 + kLabelWidth - 6 << "\" y=\"" << y + kCell / 2 + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << to_string(kLabels[i]) << "</text>\n";
        for (std::size_t j = 0; j < 3; ++j) {
            const int x = x0 + kLabelWidth + static_cast<int>(j) * kCell;
            const double t = scale > 0 ? values[i][j] / scale : 0.0;
            svg << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\"" << kCell
                << "\" fill=\"" << shade(t) << "\" stroke=\"#ffffff\"/>\n";
            const std::string label = percent ? format_fixed(values[i][j], 1)
                                              : std::to_string(static_cast<long long>(values[i][j]));
            svg << "  <text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 4
                << "\" text-anchor=\"middle\" font-size=\"12\" fill=\"" << (t > 0.5 ? "#ffffff" : "#000000")
                << "\">" << label << "</text>\n";
        }
    }
}

} // namespace

std::string render_confusion_svg(const std::vector<ConfusionSet>& sets, std::string_view title) {
    const int panel_width = kLabelWidth + 3 * kCell;
    const int panel_height = 3 * kCell + 60;
    const int width = 3 * panel_width + 2 * kPanelGap + 20;
    const int height = static_cast<int>(std::max<std::size_t>(sets.size(), 1)) * panel_height + 40;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\">\n";
    svg << "  <text x=\"10\" y=\"20\" font-size=\"14\">" << xml_escape(title)
        << " (rows: true label, columns: predicted label)</text>\n";
    for (std::size_t s = 0; s < sets.size(); ++s) {
        const auto& set = sets[s];
        const int y0 = 40 + static_cast<int>(s) * panel_height + 40;
        std::array<std::array<double, 3>, 3> raw{};
        double max_count = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                raw[i][j] = static_cast<double>(set.matrix.counts[i][j]);
                max_count = std::max(max_count, raw[i][j]);
            }
        }
        panel(svg, 10, y0, set.set + ": counts", raw, max_count, false);
        panel(svg, 10 + panel_width + kPanelGap, y0, set.set + ": row % (recall)",
              normalize(set.matrix, Axis::Row), 100.0, true);
        panel(svg, 10 + 2 * (panel_width + kPanelGap), y0, set.set + ": column % (precision)",
              normalize(set.matrix, Axis::Column), 100.0, true);
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string RunInfo::name() const {
    return prompt_type.empty() ? model_type : model_type + "/" + prompt_type;
}

RunInfo describe_run(const std::filesystem::path& dir) {
    RunInfo info{dir, {}, {}};
    const auto manifest = dir / "manifest.json";
    if (std::filesystem::exists(manifest)) {
        try {
            const auto j = nlohmann::json::parse(csv::read_file(manifest));
            info.model_type = j.value("model_type", "");
            info.prompt_type = j.value("prompt_type", "");
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(manifest.string() + ": " + e.what());
        }
    }
    auto clean = dir.lexically_normal();
    if (!clean.has_filename()) clean = clean.parent_path();
    if (info.model_type.empty()) {
        info.model_type = clean.parent_path().filename().string();
        if (info.prompt_type.empty()) info.prompt_type = clean.filename().string();
    }
    return info;
}

std::vector<SummaryRow> summarize_runs(const std::vector<RunInfo>& runs, const std::vector<std::string>& only_sets) {
    std::vector<SummaryRow> rows;
    for (const auto& run : runs) {
        const auto path = run.dir / "metrics.csv";
        if (!std::filesystem::exists(path)) throw SchemaError("run " + run.name() + ": missing " + path.string());
        std::vector<MetricsRow> metrics;
        try {
            metrics = read_metrics_csv(csv::read_file(path), path.string());
        } catch (const Error& e) {
            throw SchemaError("run " + run.name() + ": malformed metrics.csv: " + e.what());
        }
        for (const auto& m : metrics) {
            if (!only_sets.empty() && std::find(only_sets.begin(), only_sets.end(), m.set) == only_sets.end()) {
                continue;
            }
            rows.push_back(SummaryRow{run.model_type, run.prompt_type, m.set, m.f1_macro,
                                      m.per_class[index_of(StanceLabel::None)].f1,
                                      m.per_class[index_of(StanceLabel::Favor)].f1,
                                      m.per_class[index_of(StanceLabel::Against)].f1, run.name()});
        }
    }
    auto set_rank = [](const std::string& set) {
        if (auto p = parse_partition(set)) return static_cast<int>(*p);
        return 3;
    };
    std::stable_sort(rows.begin(), rows.end(), [&](const SummaryRow& a, const SummaryRow& b) {
        if (a.f1_macro != b.f1_macro) return a.f1_macro > b.f1_macro;
        if (a.run != b.run) return a.run < b.run;
        if (set_rank(a.partition) != set_rank(b.partition)) return set_rank(a.partition) < set_rank(b.partition);
        return a.partition < b.partition;
    });
    return rows;
}

std::string write_summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    csv::write_row(out, {"model_type", "prompt_type", "partition", "f1_macro", "f1_NONE", "f1_FAVOR", "f1_AGAINST"});
    for (const auto& r : rows) {
        csv::write_row(out, {r.model_type, r.prompt_type, r.partition, format_fixed(r.f1_macro, 6),
                             format_fixed(r.f1_none, 6), format_fixed(r.f1_favor, 6), format_fixed(r.f1_against, 6)});
    }
    return out.str();
}

} // namespace stance::metrics
