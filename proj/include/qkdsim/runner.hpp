#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace qkdsim {

// Configuration problems exit with status 2, runtime failures with 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::optional<uint64_t> seed;
    std::optional<uint64_t> shots;
    std::optional<uint64_t> rounds;
    std::optional<int> workers;
    std::string out_dir = "out";
    std::optional<std::string> label;
    bool force = false;
};

struct RunResult {
    std::filesystem::path run_dir;
    nlohmann::json summary;
};

extern const char* kToolVersion;

nlohmann::json load_config_file(const std::string& path);

RunResult run_experiment(const nlohmann::json& config, const RunOptions& options);

RunResult sweep_experiment(const nlohmann::json& config, const std::string& param,
                           const std::vector<double>& grid, const RunOptions& options);

}  // namespace qkdsim
