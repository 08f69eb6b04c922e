#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gammachan/distributions.hpp"
#include "gammachan/estimates.hpp"
#include "gammachan/gamma_channel.hpp"

namespace gammachan {

// Knobs shared by every row producer; config maps onto this one-to-one.
struct LabSettings {
    std::size_t mc_samples = 200000;
    std::size_t bins = 0;  // 0 = auto
    std::uint64_t seed = 20260822;
    bool richardson = true;  // one extrapolation level on central differences
    double quad_rel_tol = 1e-9;
};

// Central-difference step, floored so the difference stays above quadrature
// noise: max(1e-3, 1e-2 * r), clamped to r/2.
double fd_step(double r);
double fd_derivative(const std::function<double(double)>& f, double r, bool richardson);

// Law of s*X within the same family (used to enforce E[X] = alpha/lambda).
InputDistribution scale_input(const InputDistribution& dist, double s);

// D(X_r || gamma(alpha, lambda/(1+r))); closed form when the marginal is gamma.
double relative_entropy_vs_rescaled_gamma(const InputDistribution& dist,
                                          const ChannelParams& p);
// D(X || gamma(alpha, lambda)) of the input itself.
double input_relative_entropy(const InputDistribution& dist, double alpha, double lambda);

// E_X[ J_st,gamma(alpha,lambda)( X_r(x)/(1+r) ) ], the conditional half of the
// entropy-flow decomposition; 64-node Gauss-Legendre against p_X.
double mean_conditional_rescaled_fisher(const InputDistribution& dist,
                                        const ChannelParams& p);

// The three routes of the mutual-information decomposition under u -> u/(1+r):
// direct_mi = I(X; X_r), and the two relative-entropy terms whose difference
// must reproduce it.
struct MiReDecomposition {
    double direct_mi = 0.0;
    double mean_conditional_term = 0.0;
    double marginal_term = 0.0;
};
MiReDecomposition mi_re_decomposition(const InputDistribution& dist, const ChannelParams& p);

// Two-sided Kolmogorov-Smirnov distance against a reference CDF, and the
// finite-n critical value at level in {0.1, 0.05, 0.01, 0.001}.
double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf);
double ks_critical_value(double level, std::size_t n);

// Row producers, one per report family. base.r is a template; the grid drives r.
std::vector<IdentityCheckRow> relative_entropy_flow_rows(const InputDistribution& dist,
                                                         const ChannelParams& base,
                                                         const std::vector<double>& r_grid,
                                                         const LabSettings& s);
std::vector<IdentityCheckRow> debruijn_rows(const InputDistribution& dist,
                                            const ChannelParams& base,
                                            const std::vector<double>& r_grid,
                                            const LabSettings& s);
IdentityCheckRow debruijn_integrated_row(const InputDistribution& dist,
                                         const ChannelParams& base, const LabSettings& s);
std::vector<IdentityCheckRow> gsv_rows(const InputDistribution& dist,
                                       const ChannelParams& base,
                                       const std::vector<double>& r_grid,
                                       const LabSettings& s);
std::vector<IdentityCheckRow> bounds_rows(const InputDistribution& dist,
                                          const ChannelParams& base,
                                          const std::vector<double>& r_grid,
                                          const LabSettings& s);
std::vector<IdentityCheckRow> alpha_half_rows(double lambda,
                                              const std::vector<double>& r_grid,
                                              const LabSettings& s);
std::vector<IdentityCheckRow> explore_alpha_rows(const std::vector<double>& alpha_grid,
                                                 double lambda,
                                                 const std::vector<double>& r_grid,
                                                 const LabSettings& s);
std::vector<IdentityCheckRow> channel_sweep_rows(const InputDistribution& dist,
                                                 const ChannelParams& base,
                                                 const std::vector<double>& r_grid,
                                                 const LabSettings& s);
std::vector<IdentityCheckRow> stein_rows(double alpha, double lambda, const LabSettings& s);

// Work queue: jobs run concurrently, results land in job order, then the merge
// sorts by (identity, input, alpha, lambda, r) so reports are schedule-free.
using RowJob = std::function<std::vector<IdentityCheckRow>()>;
std::vector<IdentityCheckRow> run_jobs(std::vector<RowJob> jobs, std::size_t workers);
void sort_rows(std::vector<IdentityCheckRow>& rows);

}  // namespace gammachan
