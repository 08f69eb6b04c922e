#include "gammachan/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gammachan/errors.hpp"
#include "gammachan/gaussian_channel.hpp"
#include "gammachan/gamma_channel.hpp"
#include "gammachan/identity_lab.hpp"

namespace gammachan {

namespace {

std::vector<double> positive_part(const std::vector<double>& grid) {
    std::vector<double> out;
    for (double r : grid) {
        if (r > 0.0) out.push_back(r);
    }
    return out;
}

// the flow identities assume E[X] = alpha/lambda; the gamma family scales
// exactly, so feed each alpha a mean-matched copy of the configured input
InputDistribution matched_input(const InputDistribution& dist, double alpha, double lambda) {
    const double m = dist.mean();
    const double target = alpha / lambda;
    if (std::fabs(m * lambda / alpha - 1.0) <= 1e-12) return dist;
    auto scaled = scale_input(dist, target / m);
    std::fprintf(stderr, "note: input %s rescaled to %s so E[X] = alpha/lambda = %g\n",
                 dist.id().c_str(), scaled.id().c_str(), target);
    return scaled;
}

void append_stein_jobs(std::vector<RowJob>& jobs, const ExperimentConfig& cfg) {
    const LabSettings s = cfg.lab_settings();
    for (double alpha : cfg.alphas) {
        jobs.push_back([alpha, lambda = cfg.lambda, s] { return stein_rows(alpha, lambda, s); });
    }
}

void append_gaussian_jobs(std::vector<RowJob>& jobs, const ExperimentConfig& cfg) {
    const auto grid = cfg.r_grid();
    const auto pos = positive_part(grid);
    jobs.push_back([grid] { return gaussian_calibration_rows(grid); });
    jobs.push_back([pos] { return gaussian_gsv_rows(standard_normal_input(), pos); });
    jobs.push_back([pos] { return gaussian_debruijn_rows(standard_normal_input(), pos); });
    // the standardized configured input exercises the generic quadrature path
    jobs.push_back([pos, input = cfg.make_input()] {
        return gaussian_gsv_rows(standardized_input(input), pos);
    });
    jobs.push_back([pos, input = cfg.make_input()] {
        return gaussian_debruijn_rows(standardized_input(input), pos);
    });
}

void append_channel_sweep_jobs(std::vector<RowJob>& jobs, const ExperimentConfig& cfg) {
    const LabSettings s = cfg.lab_settings();
    const auto grid = cfg.r_grid();
    for (double alpha : cfg.alphas) {
        jobs.push_back([alpha, cfg2 = cfg, grid, s] {
            return channel_sweep_rows(cfg2.make_input(), {alpha, cfg2.lambda, 0.0}, grid, s);
        });
    }
}

void append_debruijn_jobs(std::vector<RowJob>& jobs, const ExperimentConfig& cfg) {
    const LabSettings s = cfg.lab_settings();
    const auto grid = cfg.r_grid();
    for (double alpha : cfg.alphas) {
        jobs.push_back([alpha, cfg2 = cfg, grid, s] {
            const auto input = matched_input(cfg2.make_input(), alpha, cfg2.lambda);
            return relative_entropy_flow_rows(input, {alpha, cfg2.lambda, 0.0}, grid, s);
        });
        jobs.push_back([alpha, cfg2 = cfg, grid, s] {
            const auto input = matched_input(cfg2.make_input(), alpha, cfg2.lambda);
            return debruijn_rows(input, {alpha, cfg2.lambda, 0.0}, grid, s);
        });
        jobs.push_back([alpha, cfg2 = cfg, s] {
            const auto input = cfg2.make_input();
            return std::vector<IdentityCheckRow>{
                debruijn_integrated_row(input, {alpha, cfg2.lambda, 0.0}, s)};
        });
    }
}

void append_gsv_jobs(std::vector<RowJob>& jobs, const ExperimentConfig& cfg) {
    const LabSettings s = cfg.lab_settings();
    const auto grid = cfg.r_grid();
    for (double alpha : cfg.alphas) {
        jobs.push_back([alpha, cfg2 = cfg, grid, s] {
            return gsv_rows(cfg2.make_input(), {alpha, cfg2.lambda, 0.0}, grid, s);
        });
    }
}

void append_bounds_jobs(std::vector<RowJob>& jobs, const ExperimentConfig& cfg) {
    const LabSettings s = cfg.lab_settings();
    const auto grid = cfg.r_grid();
    for (double alpha : cfg.alphas) {
        jobs.push_back([alpha, cfg2 = cfg, grid, s] {
            return bounds_rows(cfg2.make_input(), {alpha, cfg2.lambda, 0.0}, grid, s);
        });
    }
}

void append_asymptotics_jobs(std::vector<RowJob>& jobs, const ExperimentConfig& cfg) {
    const LabSettings s = cfg.lab_settings();
    jobs.push_back([lambda = cfg.lambda, grid = cfg.r_grid(), s] {
        return alpha_half_rows(lambda, grid, s);
    });
}

void append_explore_jobs(std::vector<RowJob>& jobs, const ExperimentConfig& cfg) {
    const LabSettings s = cfg.lab_settings();
    jobs.push_back([alphas = cfg.alphas, lambda = cfg.lambda, grid = cfg.r_grid(), s] {
        return explore_alpha_rows(alphas, lambda, grid, s);
    });
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names = {
        "stein-check",  "gaussian-baseline", "channel-sweep", "debruijn-check",
        "gsv-check",    "bounds-report",     "asymptotics",   "explore-alpha",
        "all"};
    return names;
}

std::vector<RowJob> build_jobs(const std::string& subcommand, const ExperimentConfig& cfg) {
    std::vector<RowJob> jobs;
    const bool all = subcommand == "all";
    bool known = all;
    if (all || subcommand == "stein-check") {
        append_stein_jobs(jobs, cfg);
        known = true;
    }
    if (all || subcommand == "gaussian-baseline") {
        append_gaussian_jobs(jobs, cfg);
        known = true;
    }
    if (all || subcommand == "channel-sweep") {
        append_channel_sweep_jobs(jobs, cfg);
        known = true;
    }
    if (all || subcommand == "debruijn-check") {
        append_debruijn_jobs(jobs, cfg);
        known = true;
    }
    if (all || subcommand == "gsv-check") {
        append_gsv_jobs(jobs, cfg);
        known = true;
    }
    if (all || subcommand == "bounds-report") {
        append_bounds_jobs(jobs, cfg);
        known = true;
    }
    if (all || subcommand == "asymptotics") {
        append_asymptotics_jobs(jobs, cfg);
        known = true;
    }
    if (all || subcommand == "explore-alpha") {
        append_explore_jobs(jobs, cfg);
        known = true;
    }
    if (!known) {
        std::string usage = "unknown subcommand '" + subcommand + "'; expected one of";
        for (const auto& n : subcommand_names()) usage += " " + n;
        throw ConfigError(usage);
    }
    return jobs;
}

int run_cli(const RunOptions& opts) {
    try {
        ExperimentConfig cfg = load_config(opts.config_path);
        if (opts.seed.has_value()) cfg.estimation.seed = *opts.seed;
        if (opts.print_config) {
            std::fputs(cfg.render().c_str(), stdout);
            return 0;
        }
        auto jobs = build_jobs(opts.subcommand, cfg);
        RunReport report;
        report.rows = run_jobs(std::move(jobs), std::max<std::size_t>(1, opts.jobs));
        report.config_hash = cfg.digest();
        try {
            emit_csv(report.rows, cfg.outputs.csv_path);
            emit_json(report, cfg.outputs.json_path);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "report output failed: %s\n", e.what());
            return 1;
        }
        print_summary(report, stderr);
        return report.verdict_pass() ? 0 : 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace gammachan
