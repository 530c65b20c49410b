#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qkdsim/runner.hpp"

namespace {

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> grid;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) grid.push_back(std::stod(item));
    return grid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qkd-nutshell: QKD attack and QEC channel-monitoring experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", label, grid_csv, param;
    uint64_t seed = 0, shots = 0, rounds = 0;
    int workers = 0;
    bool force = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "experiment config (JSON)")->required();
        cmd->add_option("--seed", seed, "master seed override");
        cmd->add_option("--shots", shots, "shot count override");
        cmd->add_option("--rounds", rounds, "round count override");
        cmd->add_option("--workers", workers, "worker threads (never affects results)");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--label", label, "run label (output subdirectory)");
        cmd->add_flag("--force", force, "overwrite an existing output directory");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "run one experiment config");
    add_common(run_cmd);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a config across a parameter grid");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--param", param, "parameter to sweep")->required();
    sweep_cmd->add_option("--grid", grid_csv, "comma-separated grid values")->required();

    CLI11_PARSE(app, argc, argv);

    qkdsim::RunOptions options;
    options.out_dir = out_dir;
    options.force = force;
    if (!label.empty()) options.label = label;
    if (run_cmd->count("--seed") || sweep_cmd->count("--seed")) options.seed = seed;
    if (shots > 0) options.shots = shots;
    if (rounds > 0) options.rounds = rounds;
    if (workers > 0) options.workers = workers;

    try {
        nlohmann::json config = qkdsim::load_config_file(config_path);
        qkdsim::RunResult result;
        if (app.got_subcommand(run_cmd)) {
            result = qkdsim::run_experiment(config, options);
        } else {
            result = qkdsim::sweep_experiment(config, param, parse_grid(grid_csv), options);
        }
        std::cout << "wrote " << result.run_dir.string() << "\n";
        return 0;
    } catch (const qkdsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
