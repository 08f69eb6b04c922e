#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gammachan/distributions.hpp"
#include "gammachan/estimates.hpp"
#include "gammachan/rng.hpp"

namespace gammachan {

// Additive reference channel X_r = sqrt(r) X + N, N ~ N(0,1). Inputs are
// standardized to mean 0, variance 1 before every check so the closed forms
// (variance 1 + r, MI = 1/2 ln(1+r) for normal X, ...) apply directly.
struct GaussianInput {
    ScoredDensity density;
    std::function<double(CounterRng&)> draw;
    double mean2 = 1.0;  // E[X^2]
    std::string id;
};

GaussianInput standard_normal_input();
GaussianInput standardized_input(const InputDistribution& dist);

struct GaussianRecord {
    double x = 0.0;
    double n = 0.0;
    double x_r = 0.0;
};

std::vector<GaussianRecord> gaussian_sample(const GaussianInput& input, double r,
                                            std::size_t n, std::uint64_t seed,
                                            std::uint64_t stream = 0);
// Point-mass input X == x0.
std::vector<GaussianRecord> gaussian_sample_at(double x0, double r, std::size_t n,
                                               std::uint64_t seed, std::uint64_t stream = 0);

// Density of X_r with analytic derivative (score).
ScoredDensity gaussian_marginal(const GaussianInput& input, double r);

double gaussian_mmse(const GaussianInput& input, double r);
double gaussian_mutual_information(const GaussianInput& input, double r);

// J_st(X_r) from the MMSE link: r (1 - (1+r) mmse).
double gaussian_jst_from_mmse(const GaussianInput& input, double r);

// D(X_r || N(0,1)).
double gaussian_relative_entropy(const GaussianInput& input, double r);

// MC mean of (rho_r(X_r) - (sqrt(r) E[X|X_r] - X_r))^2.
MonteCarloEstimate gaussian_score_representation_gap(const GaussianInput& input, double r,
                                                     std::size_t n, std::uint64_t seed);

// Closed-form calibration rows (normal input), GSV and De Bruijn checks.
std::vector<IdentityCheckRow> gaussian_calibration_rows(const std::vector<double>& r_grid);
std::vector<IdentityCheckRow> gaussian_gsv_rows(const GaussianInput& input,
                                                const std::vector<double>& r_grid);
std::vector<IdentityCheckRow> gaussian_debruijn_rows(const GaussianInput& input,
                                                     const std::vector<double>& r_grid);

}  // namespace gammachan
