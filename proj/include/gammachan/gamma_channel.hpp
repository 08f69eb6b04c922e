#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gammachan/distributions.hpp"
#include "gammachan/estimates.hpp"
#include "gammachan/interp.hpp"

namespace gammachan {

// X_r = G + Y_r^2 with G ~ gamma(alpha - 1/2, lambda) (point mass at 0 when
// alpha = 1/2), Y_r = sqrt(r X) + N / sqrt(2 lambda), N ~ N(0,1).
struct ChannelParams {
    double alpha = 1.0;
    double lambda = 1.0;
    double r = 1.0;
};

void validate(const ChannelParams& p);  // alpha >= 1/2, lambda > 0, r >= 0

struct ChannelRecord {
    double x = 0.0;
    double g = 0.0;
    double n = 0.0;
    double y_r = 0.0;
    double x_r = 0.0;
    double v_r = 0.0;  // Y_r / sqrt(X_r), in [-1, 1]
};

std::vector<ChannelRecord> channel_sample(const InputDistribution& dist,
                                          const ChannelParams& p, std::size_t n,
                                          std::uint64_t seed, std::uint64_t stream = 0);
// Point-mass input X == x0 (used by the per-x estimators).
std::vector<ChannelRecord> channel_sample_at(double x0, const ChannelParams& p,
                                             std::size_t n, std::uint64_t seed,
                                             std::uint64_t stream = 0);

void write_records_csv(const std::vector<ChannelRecord>& records, const std::string& path);

// ln p(u | X = x): noncentral-gamma kernel via log Bessel I; the rx -> 0 limit
// is the central gamma(alpha, lambda) log-density.
double conditional_log_density(const ChannelParams& p, double x, double u);
// d/du of the above, via d/dz ln I_nu.
double conditional_log_density_du(const ChannelParams& p, double x, double u);

// Conditional law of X_r given X = x as a scored density with effective support.
ScoredDensity conditional_density(const ChannelParams& p, double x);

// E[X_r | X = x] and Var[X_r | X = x].
double conditional_mean(const ChannelParams& p, double x);
double conditional_variance(const ChannelParams& p, double x);

// Marginal density of X_r. Closed form (gamma) when the input is a gamma law
// with shape equal to the channel alpha; outer quadrature in scaled log space
// otherwise. build_grid() tabulates ln p on a log-u grid for fast reuse.
class ChannelMarginal {
public:
    ChannelMarginal(const InputDistribution& dist, const ChannelParams& p,
                    double rel_tol = 1e-9);

    double log_density(double u) const;
    double dlog_density(double u) const;
    double log_density_fast(double u) const;  // grid interpolation when built

    void build_grid(std::size_t nodes = 2048);
    bool has_grid() const { return has_grid_; }

    ScoredDensity as_scored_density() const;
    std::pair<double, double> support() const { return {lo_, hi_}; }
    bool closed_form() const { return closed_; }
    GammaParams closed_params() const { return closed_params_; }

    // Grid cache on disk, keyed by (input, params, node count).
    bool load_cache(const std::string& path);
    void save_cache(const std::string& path) const;
    std::string cache_key() const;

private:
    double quadrature_log_density(double u, double* dlog) const;

    InputDistribution dist_;
    ChannelParams p_;
    double rel_tol_;
    bool closed_ = false;
    GammaParams closed_params_{};
    double lo_ = 0.0, hi_ = 1.0;
    double xlo_ = 0.0, xhi_ = 1.0;
    UniformCubic grid_;  // ln p over ln u
    bool has_grid_ = false;
};

// E[exp(t X_r)] via the factorization over the input MGF; t must sit inside
// [0, window), window = lambda / (lambda r / a + 1) with a the input window.
double channel_mgf(const InputDistribution& dist, const ChannelParams& p, double t);
double channel_mgf_window(const InputDistribution& dist, const ChannelParams& p);

// Equal-mass binned regression of g(record) on x_r.
struct BinnedRegression {
    std::vector<double> edges;  // bins()+1 ascending edges
    std::vector<double> mean;
    std::vector<double> se;
    std::vector<double> mass;
    std::vector<std::size_t> count;

    std::size_t bins() const { return mean.size(); }
    double operator()(double x_r) const;
};

std::size_t default_bins(std::size_t n);
BinnedRegression binned_conditional_expectation(
    const std::vector<ChannelRecord>& records,
    const std::function<double(const ChannelRecord&)>& g, std::size_t bins = 0);

// Mass-weighted sum of squared bin means, the plug-in for E[E[g|X_r]^2], and
// its SE from a parametric bootstrap over the bin means (deterministic in seed).
double binned_square_sum(const BinnedRegression& reg);
double binned_square_sum_se(const BinnedRegression& reg, std::uint64_t seed);

// J_st of X_r against gamma(alpha, lambda), Monte Carlo route:
// lambda * sum_b mass_b * mean_b^2 for the regression of sqrt(r x) v_r on x_r.
// SE by bin-level bootstrap.
MonteCarloEstimate channel_jst_mc(const InputDistribution& dist, const ChannelParams& p,
                                  std::size_t n, std::uint64_t seed, std::size_t bins = 0);

// Quadrature route; evaluates the rescaled variable X_r/(1+r) against
// gamma(alpha, lambda) and maps back through the exact two-rate relation.
double channel_jst_quadrature(const InputDistribution& dist, const ChannelParams& p);
// J_st,gamma(alpha,lambda)( X_r/(1+r) ) itself (the entropy-flow integrand core).
double channel_jst_rescaled(const InputDistribution& dist, const ChannelParams& p);

// Noise-corrected binned mean-square gap between the gamma-score identity LHS
// lambda sqrt(u) - (alpha-1/2)/sqrt(u) + score-of-marginal terms and the
// regression estimate of lambda E[sqrt(r X) V_r | X_r = u].
MonteCarloEstimate channel_score_representation_gap(const InputDistribution& dist,
                                                    const ChannelParams& p, std::size_t n,
                                                    std::uint64_t seed,
                                                    std::size_t bins = 0);

// I(X; X_r) by double quadrature (outer x against the input, inner u against
// the conditional, marginal interpolated from a grid).
double mutual_information_quadrature(const InputDistribution& dist, const ChannelParams& p);

// I(X; X_r) by Monte Carlo over the joint law using closed-form conditional and
// marginal log-densities; requires a gamma input with shape == alpha.
MonteCarloEstimate mutual_information_mc(const InputDistribution& dist,
                                         const ChannelParams& p, std::size_t n,
                                         std::uint64_t seed);

}  // namespace gammachan
