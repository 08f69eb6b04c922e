#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gammachan/config.hpp"
#include "gammachan/report.hpp"

namespace gammachan {

struct RunOptions {
    std::string subcommand = "all";
    std::string config_path;  // empty loads defaults
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 1;
    bool print_config = false;
};

const std::vector<std::string>& subcommand_names();

// Builds the work queue for one subcommand; throws ConfigError on an unknown
// name so the caller maps it to the usage exit code.
std::vector<RowJob> build_jobs(const std::string& subcommand, const ExperimentConfig& cfg);

// Full CLI behavior behind a testable seam: load config, run, emit reports.
// Returns the process exit code (0 pass, 1 failure, 2 usage/config).
int run_cli(const RunOptions& opts);

}  // namespace gammachan
