// narx-sysid: closed-loop PRBS excitation, NARX estimator training, and
// evaluation for simulated quadrotor attitude-rate dynamics.

#include <cstdint>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nsid/config.hpp"
#include "nsid/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"NARX system identification toolkit"};
    app.require_subcommand(1);

    std::string config_path, dataset_path, model_path, out_dir = ".";
    std::optional<std::uint64_t> seed;
    int jobs = 1;

    auto* excite = app.add_subcommand("excite", "run a closed-loop PRBS experiment");
    excite->add_option("--config", config_path, "experiment config file")->required();
    excite->add_option("--out", out_dir, "output directory");
    excite->add_option("--seed", seed, "override the config seed");
    excite->add_option("--jobs", jobs, "reserved for multi-axis runs");

    auto* train = app.add_subcommand("train", "fit the configured NARX estimator");
    train->add_option("--config", config_path, "experiment config file")->required();
    train->add_option("--dataset", dataset_path, "dataset.csv from excite")->required();
    train->add_option("--out", out_dir, "output directory");
    train->add_option("--seed", seed, "override the config seed");

    auto* eval = app.add_subcommand("eval", "evaluate a saved model on a dataset");
    eval->add_option("--model", model_path, "model.txt from train")->required();
    eval->add_option("--dataset", dataset_path, "dataset.csv from excite")->required();
    eval->add_option("--out", out_dir, "output directory");

    auto* report = app.add_subcommand("report", "render the bundle plots as SVG");
    report->add_option("--out", out_dir, "run bundle directory")->required();

    auto* print_config = app.add_subcommand("print-config", "print the default config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : nsid::app::kExitInput;
    }

    if (excite->parsed())
        return nsid::app::cmd_excite(config_path, out_dir, seed);
    if (train->parsed())
        return nsid::app::cmd_train(config_path, dataset_path, out_dir, seed);
    if (eval->parsed())
        return nsid::app::cmd_eval(model_path, dataset_path, out_dir);
    if (report->parsed())
        return nsid::app::cmd_report(out_dir);
    if (print_config->parsed()) {
        std::fputs(nsid::config::default_config_text().c_str(), stdout);
        return 0;
    }
    return nsid::app::kExitInput;
}
