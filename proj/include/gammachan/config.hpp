#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gammachan/distributions.hpp"
#include "gammachan/identity_lab.hpp"

namespace gammachan {

// Flat INI-style configuration with [channel] / [input] / [estimation] /
// [outputs] sections.  Every key can be overridden from the environment as
// GAMMACHAN_<SECTION>_<KEY> (upper case), applied after the file is read.

struct RGridSpec {
    double min = 0.0;
    double max = 4.0;
    std::size_t count = 9;
    std::string spacing = "linear";  // linear | log
};

struct InputSpec {
    std::string kind = "gamma";  // gamma | exponential | mixture | lognormal
    double shape = 1.0;
    double rate = 1.0;
    std::vector<double> weights{0.5, 0.5};  // mixture only
    std::vector<double> shapes{2.0, 3.0};
    std::vector<double> rates{4.0, 2.0};
    double mu = 0.0;  // lognormal only
    double sigma = 0.5;
};

struct EstimationSpec {
    std::size_t mc_samples = 200000;
    std::size_t bins = 0;  // 0 picks n^{1/3}, clamped
    std::uint64_t seed = 20260822;
    std::string fd_step_rule = "richardson";  // richardson | plain
    double quad_rel_tol = 1e-9;
};

struct OutputSpec {
    std::string csv_path = "report.csv";
    std::string json_path = "report.json";
};

struct ExperimentConfig {
    std::vector<double> alphas{1.0};
    double lambda = 1.0;
    RGridSpec r;
    InputSpec input;
    EstimationSpec estimation;
    OutputSpec outputs;

    void validate() const;  // throws ConfigError naming the offending field

    std::vector<double> r_grid() const;
    InputDistribution make_input() const;
    LabSettings lab_settings() const;

    // canonical key/value rendering; doubles as the --print-config output and
    // the digest input, so equal configs hash equally
    std::string render() const;
    std::string digest() const;
};

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);
ExperimentConfig load_config(const std::string& path);  // "" loads defaults
void apply_env_overrides(ExperimentConfig& cfg);

}  // namespace gammachan
