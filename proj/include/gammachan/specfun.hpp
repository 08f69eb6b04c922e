#pragma once

// Scalar special functions used by the densities and identity checks.
// Everything returns log-space values where overflow is possible.

namespace gammachan {

// ln Gamma(x), x > 0.
double log_gamma(double x);

// psi(x) = d/dx ln Gamma(x), x > 0.
double digamma(double x);

// ln I_nu(z) for nu >= -1/2, z >= 0. Power series below z* = 30 + 2|nu|,
// large-argument expansion above it.
double log_bessel_i(double nu, double z);

// d/dz ln I_nu(z). Uses I_{nu-1}/I_nu for nu >= 1/2; for nu in [-1/2, 1/2)
// the series derivative (small z) or I_{nu+1}/I_nu (large z), both in-domain.
double log_bessel_i_derivative(double nu, double z);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double reg_lower_gamma(double a, double x);

// Standard normal CDF.
double normal_cdf(double x);

}  // namespace gammachan
