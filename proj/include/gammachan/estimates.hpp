#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

namespace gammachan {

struct MonteCarloEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

enum class IdentityId {
    debruijn_gamma,
    debruijn_integrated,
    gsv_gamma,
    bound_eq28,
    bound1,
    bound2,
    bound_alpha_nu,
    lower_half,
    asymptotic_half,
    gaussian_mi,
    gaussian_mmse,
    gaussian_gsv,
    gaussian_debruijn,
    stein_gaussian,
    stein_gamma,
    channel_ks,
    channel_mgf,
    fisher_routes,
    explore_alpha,
    relent_flow,
};

std::string to_string(IdentityId id);

// One check in a report: lhs vs rhs, a pinned deterministic tolerance, and
// statistical slack 3*sqrt(lhs_se^2 + rhs_se^2) on top. Bound-type rows pass
// when lhs <= rhs within the same slack. Exploratory rows carry no verdict.
struct IdentityCheckRow {
    IdentityId identity{};
    std::string input_id;
    double alpha = 0.0;
    double lambda = 0.0;
    double r = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double lhs_se = 0.0;
    double rhs_se = 0.0;
    double tolerance = 0.0;
    std::optional<bool> pass;
    double wall_ms = 0.0;  // kept in memory; not serialized (reports stay deterministic)
};

inline double combined_se(const IdentityCheckRow& row) {
    return std::sqrt(row.lhs_se * row.lhs_se + row.rhs_se * row.rhs_se);
}

inline IdentityCheckRow equality_row(IdentityId id, std::string input_id, double alpha,
                                     double lambda, double r, double lhs, double rhs,
                                     double lhs_se, double rhs_se, double tolerance) {
    IdentityCheckRow row{id, std::move(input_id), alpha, lambda, r,
                         lhs, rhs, lhs_se, rhs_se, tolerance, std::nullopt, 0.0};
    row.pass = std::fabs(lhs - rhs) <= tolerance + 3.0 * combined_se(row);
    return row;
}

inline IdentityCheckRow bound_row(IdentityId id, std::string input_id, double alpha,
                                  double lambda, double r, double lhs, double rhs,
                                  double lhs_se, double rhs_se, double tolerance) {
    IdentityCheckRow row{id, std::move(input_id), alpha, lambda, r,
                         lhs, rhs, lhs_se, rhs_se, tolerance, std::nullopt, 0.0};
    row.pass = lhs <= rhs + tolerance + 3.0 * combined_se(row);
    return row;
}

inline IdentityCheckRow exploratory_row(IdentityId id, std::string input_id, double alpha,
                                        double lambda, double r, double lhs, double rhs,
                                        double lhs_se, double rhs_se) {
    return IdentityCheckRow{id, std::move(input_id), alpha, lambda, r,
                            lhs, rhs, lhs_se, rhs_se, 0.0, std::nullopt, 0.0};
}

}  // namespace gammachan
