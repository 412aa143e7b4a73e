#include "stance/commands.hpp"

#include "stance/csv.hpp"
#include "stance/error.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace stance::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

json distribution_json(const std::map<Partition, corpus::LabelCounts>& counts) {
    json j = json::object();
    for (const auto& [partition, row] : counts) {
        json entry = json::object();
        for (StanceLabel label : kLabels) entry[std::string(to_string(label))] = row[index_of(label)];
        j[std::string(to_string(partition))] = entry;
    }
    return j;
}

/// Writes `contents` unless the file already holds exactly those bytes.
void write_if_changed(const fs::path& path, std::string_view contents) {
    if (fs::exists(path) && csv::read_file(path) == contents) return;
    csv::write_file_atomic(path, contents);
}

prompts::PromptBuilder make_builder(const RunConfig& config) {
    auto templates = config.templates_dir ? prompts::TemplateSet::from_directory(*config.templates_dir)
                                          : prompts::TemplateSet::builtin();
    return prompts::PromptBuilder(std::move(templates), config.examples);
}

std::set<std::string> exclusions_for(const RunConfig& config, prompts::PromptKind kind,
                                     const std::vector<corpus::Record>& corpus) {
    if (kind != prompts::PromptKind::FewShot) return {};
    return prompts::leakage_exclusion_ids(config.examples, corpus);
}

std::string llm_model_type(const RunConfig& config) { return "llm_" + config.model_type; }

std::vector<metrics::ConfusionSet> confusion_sets(const metrics::Evaluation& evaluation) {
    std::vector<metrics::ConfusionSet> sets;
    for (const auto& p : evaluation.partitions) sets.push_back({std::string(to_string(p.partition)), p.matrix});
    return sets;
}

} // namespace

PreprocessSummary cmd_preprocess(const RunConfig& config, std::ostream& out, std::ostream& log) {
    const std::string& target = config.topics.target_for(config.topic);
    const corpus::LoadOptions options{config.fallback_encoding};
    const auto train = corpus::load_raw_dataset(config.raw_train, target, options);
    const auto test = corpus::load_raw_dataset(config.raw_test, target, options);

    const auto train_clean = corpus::clean_and_deduplicate(train.records);
    const auto test_clean = corpus::clean_and_deduplicate(test.records);

    PreprocessSummary summary;
    summary.train_loaded = train.records.size();
    summary.test_loaded = test.records.size();
    summary.train_duplicates = train_clean.dropped;
    summary.test_duplicates = test_clean.dropped;
    summary.lines_reencoded = train.lines_reencoded + test.lines_reencoded;
    summary.records = corpus::partition_dataset(train_clean.kept, test_clean.kept, config.topic, config.seed);

    const auto distribution = corpus::label_distribution(summary.records);
    const fs::path dir = config.corpus_dir();
    write_if_changed(config.corpus_csv(), corpus::write_corpus_csv(summary.records));
    write_if_changed(config.partitions_csv(), corpus::write_partitions_csv(summary.records));

    const json record = {
        {"topic", config.topic},
        {"target", target},
        {"seed", config.seed},
        {"raw_train", {{"path", config.raw_train.string()}, {"records", summary.train_loaded},
                       {"duplicates_dropped", summary.train_duplicates}}},
        {"raw_test", {{"path", config.raw_test.string()}, {"records", summary.test_loaded},
                      {"duplicates_dropped", summary.test_duplicates}}},
        {"lines_reencoded", summary.lines_reencoded},
        {"records", summary.records.size()},
        {"distribution", distribution_json(distribution)},
    };
    write_if_changed(dir / "preprocess_log.json", record.dump(2) + "\n");

    log << "loaded " << summary.train_loaded << " train and " << summary.test_loaded << " test records for '"
        << target << "'\n";
    log << "dropped " << summary.train_duplicates << " train and " << summary.test_duplicates
        << " test duplicates after cleaning\n";
    if (summary.lines_reencoded > 0) {
        log << "re-decoded " << summary.lines_reencoded << " non-UTF-8 lines with the fallback encoding\n";
    }
    out << corpus::format_distribution(distribution);
    return summary;
}

std::vector<corpus::Record> load_corpus(const RunConfig& config) {
    const fs::path path = config.corpus_csv();
    if (!fs::exists(path)) {
        throw Error("processed corpus not found: " + path.string() + " (run preprocess first)");
    }
    return corpus::read_corpus_csv(csv::read_file(path), path.string());
}

std::vector<prompts::RenderedPrompt> build_run_prompts(const RunConfig& config,
                                                       const std::vector<corpus::Record>& corpus) {
    const auto builder = make_builder(config);
    const std::string& target = config.topics.target_for(config.topic);
    const auto excluded = exclusions_for(config, config.prompt_kind, corpus);
    std::vector<prompts::RenderedPrompt> prompts;
    for (const auto& record : corpus) {
        if (record.partition == Partition::Train) continue;
        if (excluded.contains(record.id)) continue;
        prompts.push_back(builder.build(config.prompt_kind, record, target));
    }
    return prompts;
}

llm::CostEstimate cmd_estimate_cost(const RunConfig& config, std::ostream& out) {
    const auto prompts = build_run_prompts(config, load_corpus(config));
    const llm::HeuristicTokenCounter counter;
    const auto estimate = llm::estimate_cost(prompts, counter, config.pricing.unit_price_per_1k,
                                             config.pricing.allowance_for(config.prompt_kind));
    out << "prompt kind: " << prompts::to_string(config.prompt_kind) << "\n";
    out << "prompts: " << prompts.size() << "\n";
    out << "tokens (" << counter.name() << ", incl. completion allowance): " << estimate.token_count << "\n";
    out << "Estimated total cost: $" << metrics::format_double(estimate.total) << "\n";
    return estimate;
}

llm::PredictResult cmd_predict(const RunConfig& config, const PredictFlags& flags, std::ostream& log,
                               llm::Backend* backend_override) {
    if (flags.fresh && flags.restore_cached) throw ConfigError("--fresh and --restore-cached are exclusive");
    const auto corpus = load_corpus(config);
    const auto prompts = build_run_prompts(config, corpus);

    std::unique_ptr<llm::Backend> owned;
    llm::Backend* backend = backend_override;
    if (backend == nullptr) {
        config.backend.validate();
        owned = llm::make_backend(config.backend);
        backend = owned.get();
    }

    const fs::path dir = config.run_dir();
    const fs::path out = dir / "predictions.csv";
    if (flags.restore_cached) llm::cache_rotate(out, llm::CacheAction::Restore);
    if (flags.fresh) llm::cache_rotate(out, llm::CacheAction::Fresh);

    llm::PredictOptions options;
    options.parse.lenient = config.lenient_parse;
    auto result = llm::predict_labels(prompts, *backend, config.backend, out, options);

    std::size_t fallbacks = 0;
    for (const auto& r : result.records) fallbacks += r.parse_status == parser::ParseStatus::FallbackNone;
    const std::size_t excluded = exclusions_for(config, config.prompt_kind, corpus).size();

    log << "prompts: " << prompts.size() << ", cached: " << result.cache_hits
        << ", backend calls: " << result.backend_calls << ", parse fallbacks: " << fallbacks;
    if (excluded > 0) log << ", leakage exclusions: " << excluded;
    log << "\n";

    update_manifest(dir, {
        {"model_type", llm_model_type(config)},
        {"prompt_type", std::string(prompts::to_string(config.prompt_kind))},
        {"config", config.snapshot},
        {"backend", backend->identity()},
        {"custom_examples", prompts::is_custom_example_set(config.examples)},
        {"predict", {{"prompts", prompts.size()}, {"parse_fallbacks", fallbacks},
                     {"leakage_exclusions", excluded}, {"failed", result.failed.size()}}},
    });

    if (!result.failed.empty()) {
        std::ostringstream msg;
        msg << result.failed.size() << " request(s) failed after retries:";
        for (const auto& [id, error] : result.failed) msg << "\n  " << id << ": " << error;
        throw BackendError(msg.str());
    }
    return result;
}

metrics::Evaluation cmd_evaluate(const RunConfig& config, const EvaluateFlags& flags, std::ostream& out,
                                 std::ostream& log) {
    const fs::path dir = flags.run_dir.value_or(config.run_dir());
    const fs::path path = dir / "predictions.csv";
    if (!fs::exists(path)) throw Error("predictions not found: " + path.string());
    const auto corpus = load_corpus(config);
    const std::string contents = csv::read_file(path);
    const auto header = csv::parse(contents).header;
    const bool label_file = std::find(header.begin(), header.end(), "predicted_label") != header.end() &&
                            std::find(header.begin(), header.end(), "stance_predicted") == header.end();

    std::vector<metrics::ScoredPrediction> predictions;
    std::set<std::string> exclusions;
    if (label_file) {
        predictions = metrics::read_label_predictions_csv(contents, path.string());
    } else {
        const auto info = metrics::describe_run(dir);
        const auto kind = prompts::parse_prompt_kind(info.prompt_type).value_or(config.prompt_kind);
        parser::ParseOptions parse;
        parse.lenient = config.lenient_parse;
        for (const auto& r : llm::read_predictions_csv(contents, path.string(), kind, parse)) {
            predictions.push_back({r.id, r.extracted_label, r.parse_status == parser::ParseStatus::FallbackNone});
        }
        exclusions = exclusions_for(config, kind, corpus);
    }

    auto evaluation = metrics::evaluate_run(predictions, corpus, flags.partitions, exclusions, path.string());
    if (!evaluation.unknown_ids.empty()) {
        log << "warning: ignored " << evaluation.unknown_ids.size() << " prediction(s) with unknown IDs:";
        for (std::size_t i = 0; i < evaluation.unknown_ids.size() && i < 10; ++i) {
            log << " " << evaluation.unknown_ids[i];
        }
        if (evaluation.unknown_ids.size() > 10) log << " ...";
        log << "\n";
    }

    write_if_changed(dir / "metrics.csv", metrics::write_metrics_csv(evaluation));
    write_if_changed(dir / "confusion_matrix.csv", metrics::write_confusion_csv(evaluation));
    const auto info = metrics::describe_run(dir);
    write_if_changed(dir / "confusion_matrix.svg", metrics::render_confusion_svg(confusion_sets(evaluation), info.name()));

    json scored = json::object();
    for (const auto& p : evaluation.partitions) {
        const std::string set(to_string(p.partition));
        log << set << ": " << p.matrix.total() << " scored, " << p.excluded << " excluded, "
            << p.report.fallback_none_count << " parse fallbacks\n";
        out << set << " f1_macro " << metrics::format_fixed(p.report.f1_macro, 6) << "\n";
        scored[set] = {{"scored", p.matrix.total()},
                       {"excluded", p.excluded},
                       {"parse_fallbacks", p.report.fallback_none_count},
                       {"f1_macro", p.report.f1_macro}};
    }
    json patch = {{"evaluate", scored}};
    if (!fs::exists(dir / "manifest.json")) {
        patch["model_type"] = info.model_type;
        patch["prompt_type"] = info.prompt_type;
    }
    update_manifest(dir, patch);
    return evaluation;
}

std::vector<metrics::SummaryRow> cmd_summarize(const RunConfig& config, const SummarizeFlags& flags,
                                               std::ostream& out) {
    std::vector<fs::path> dirs = flags.runs;
    if (dirs.empty() && fs::exists(config.workdir)) {
        for (const auto& model : fs::directory_iterator(config.workdir)) {
            if (!model.is_directory()) continue;
            for (const auto& run : fs::directory_iterator(model.path())) {
                if (run.is_directory() && fs::exists(run.path() / "metrics.csv")) dirs.push_back(run.path());
            }
        }
        std::sort(dirs.begin(), dirs.end());
    }
    if (dirs.empty()) throw Error("no runs with metrics.csv found under " + config.workdir.string());

    std::vector<metrics::RunInfo> runs;
    for (const auto& dir : dirs) runs.push_back(metrics::describe_run(dir));
    const auto rows = metrics::summarize_runs(runs, flags.sets);

    const fs::path summary_dir = config.summary_dir();
    const std::string table = metrics::write_summary_csv(rows);
    write_if_changed(summary_dir / "summary.csv", table);
    for (const auto& run : runs) {
        const fs::path confusion = run.dir / "confusion_matrix.csv";
        if (!fs::exists(confusion)) continue;
        auto sets = metrics::read_confusion_csv(csv::read_file(confusion), confusion.string());
        std::string file = run.name();
        std::replace(file.begin(), file.end(), '/', '_');
        write_if_changed(summary_dir / ("confusion_" + file + ".svg"), metrics::render_confusion_svg(sets, run.name()));
    }
    out << table;
    return rows;
}

void update_manifest(const fs::path& run_dir, const json& patch) {
    const fs::path path = run_dir / "manifest.json";
    json current = json::object();
    if (fs::exists(path)) {
        try {
            current = json::parse(csv::read_file(path));
        } catch (const json::exception& e) {
            throw SchemaError(path.string() + ": " + e.what());
        }
    }
    json next = current;
    next.merge_patch(patch);

    json stable_current = current;
    json stable_next = next;
    stable_current.erase("created_at");
    stable_current.erase("updated_at");
    stable_next.erase("created_at");
    stable_next.erase("updated_at");
    if (fs::exists(path) && stable_current == stable_next) return;

    const std::string now = utc_timestamp();
    if (!next.contains("created_at")) next["created_at"] = now;
    next["updated_at"] = now;
    csv::write_file_atomic(path, next.dump(2) + "\n");
}

} // namespace stance::app
