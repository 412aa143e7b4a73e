// Command-line driver: preprocess, estimate-cost, predict, evaluate, summarize.

#include "stance/commands.hpp"
#include "stance/error.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

std::vector<stance::Partition> parse_partitions(const std::vector<std::string>& names) {
    std::vector<stance::Partition> out;
    for (const auto& name : names) {
        auto partition = stance::parse_partition(name);
        if (!partition) throw stance::ConfigError("unknown partition '" + name + "' (train, vali, test)");
        out.push_back(*partition);
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stance-detection evaluation harness"};
    app.require_subcommand(1);

    std::string config_path = "stance.json";
    stance::app::Overrides overrides;
    std::string topic, prompt, backend;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "Run configuration (JSON)")->capture_default_str();
    auto* topic_opt = app.add_option("--topic", topic, "Topic key, e.g. Abortion");
    auto* prompt_opt = app.add_option("--prompt", prompt, "zero_shot, few_shot or CoT");
    auto* backend_opt = app.add_option("--backend", backend, "http_chat or replay");
    auto* seed_opt = app.add_option("--seed", seed, "Partitioning seed");

    auto* preprocess = app.add_subcommand("preprocess", "Clean, deduplicate and partition the raw corpus");
    auto* estimate = app.add_subcommand("estimate-cost", "Estimate API cost for the configured prompt kind");

    auto* predict = app.add_subcommand("predict", "Query the backend for every VALI/TEST prompt");
    stance::app::PredictFlags predict_flags;
    predict->add_flag("--fresh", predict_flags.fresh, "Move existing predictions aside and query afresh");
    predict->add_flag("--restore-cached", predict_flags.restore_cached,
                      "Restore predictions_cached.csv before running");

    auto* evaluate = app.add_subcommand("evaluate", "Score a run's predictions");
    std::string run_dir;
    std::vector<std::string> partitions{"vali", "test"};
    evaluate->add_option("--run-dir", run_dir, "Run directory (default: configured run)");
    evaluate->add_option("--partitions", partitions, "Partitions to score")->capture_default_str();

    auto* summarize = app.add_subcommand("summarize", "Combine metrics of several runs");
    stance::app::SummarizeFlags summarize_flags;
    std::vector<std::string> runs;
    summarize->add_option("--runs", runs, "Run directories (default: every run under workdir)");
    summarize->add_option("--partition", summarize_flags.sets, "Only these sets, e.g. test");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*topic_opt) overrides.topic = topic;
        if (*prompt_opt) overrides.prompt = prompt;
        if (*backend_opt) overrides.backend = backend;
        if (*seed_opt) overrides.seed = seed;
        auto config = stance::app::load_config(config_path);
        stance::app::apply_overrides(config, overrides);

        if (*preprocess) {
            stance::app::cmd_preprocess(config, std::cout, std::cerr);
        } else if (*estimate) {
            stance::app::cmd_estimate_cost(config, std::cout);
        } else if (*predict) {
            stance::app::cmd_predict(config, predict_flags, std::cerr);
        } else if (*evaluate) {
            stance::app::EvaluateFlags flags;
            if (!run_dir.empty()) flags.run_dir = run_dir;
            flags.partitions = parse_partitions(partitions);
            stance::app::cmd_evaluate(config, flags, std::cout, std::cerr);
        } else if (*summarize) {
            for (const auto& r : runs) summarize_flags.runs.emplace_back(r);
            stance::app::cmd_summarize(config, summarize_flags, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
