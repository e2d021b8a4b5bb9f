#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "psonn/experiment.hpp"

namespace {

// Exit codes: 0 success, 1 usage error, 2 data error, 3 training failure.
constexpr int kUsageError = 1;
constexpr int kDataError = 2;
constexpr int kTrainingError = 3;

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

void report_run(const psonn::ExperimentResult& result) {
    print_warnings(result.warnings);
    std::cout << psonn::render_run_report(result);
    std::cerr << "completed in " << result.duration_seconds << " s; artifacts in '"
              << result.config.output_dir << "'\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heart-attack classification: a PSO-trained neural network and four baselines"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    unsigned threads = 1;
    app.add_option("--threads", threads, "Worker threads for fitness and forest training (default 1)");

    std::string config_path, model_path, dataset_path, out_dir = "out", epochs_csv = "200,500,700";
    std::uint64_t seed = 0;

    auto* train = app.add_subcommand("train", "Train a model described by a config file");
    train->add_option("config", config_path, "Experiment config file")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Evaluate a saved model under a config");
    evaluate->add_option("config", config_path, "Experiment config file")->required();
    evaluate->add_option("model", model_path, "model.json produced by train")->required();

    auto* sweep = app.add_subcommand("sweep", "Run the psonn epoch sweep");
    sweep->add_option("config", config_path, "Experiment config file (model must be psonn)")->required();
    sweep->add_option("--epochs", epochs_csv, "Comma-separated iteration counts (default 200,500,700)");

    auto* compare = app.add_subcommand("compare", "Train and rank all five models on one dataset");
    compare->add_option("dataset", dataset_path, "CSV in the 9-column heart layout")->required();
    compare->add_option("--seed", seed, "Master seed (default 0)");
    compare->add_option("--out", out_dir, "Output directory (default out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (train->parsed()) {
            report_run(psonn::run_experiment(psonn::parse_config(config_path), threads));
        } else if (evaluate->parsed()) {
            const auto cfg = psonn::parse_config(config_path);
            std::ifstream in(model_path);
            if (!in) throw psonn::DataError("cannot open model '" + model_path + "'");
            psonn::json j;
            try {
                in >> j;
            } catch (const psonn::json::exception& e) {
                throw psonn::DataError("model '" + model_path + "': " + e.what());
            }
            auto model = psonn::model_from_json(j);
            if (model.kind != cfg.model)
                throw psonn::ConfigError("model file holds a '" + std::string(psonn::to_string(model.kind)) +
                                         "' model, config asks for '" + psonn::to_string(cfg.model) + "'");
            const auto result = psonn::evaluate_pretrained(cfg, std::move(model));
            print_warnings(result.warnings);
            std::cout << psonn::render_run_report(result);
        } else if (sweep->parsed()) {
            const auto cfg = psonn::parse_config(config_path);
            const auto epochs = psonn::detail::parse_size_list("--epochs", epochs_csv);
            const auto result = psonn::epoch_sweep(cfg, epochs, threads);
            for (const auto& run : result.runs) print_warnings(run.warnings);
            std::cout << result.table;
        } else if (compare->parsed()) {
            const auto result = psonn::compare_models(dataset_path, seed, out_dir, threads);
            std::cout << result.table;
            for (const auto& row : result.rows)
                if (!row.ok)
                    std::cerr << "model " << psonn::to_string(row.kind) << " failed: " << row.error << "\n";
        }
    } catch (const psonn::TrainingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kTrainingError;
    } catch (const psonn::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kTrainingError;
    }
    return 0;
}
