#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gammachan/distributions.hpp"
#include "gammachan/estimates.hpp"
#include "gammachan/quadrature.hpp"

namespace gammachan {

struct TestFunction {
    std::string description;
    std::function<double(double)> f;
    std::function<double(double)> f_prime;
};

// {1, x, x^2, exp(-x), cos x, sin x, sigmoid} with hand derivatives.
const std::vector<TestFunction>& standard_test_functions();

// Mean of phi'(X) - X phi(X) over the batch; 0 in expectation iff X ~ N(0,1).
MonteCarloEstimate stein_residual_gaussian(const std::vector<double>& batch,
                                           const TestFunction& phi);

// Mean of (lambda X - alpha) phi(X) - X phi'(X); 0 in expectation iff
// X ~ gamma(alpha, lambda). Batch values must be positive.
MonteCarloEstimate stein_residual_gamma(const std::vector<double>& batch, double alpha,
                                        double lambda, const TestFunction& phi);

// Square-root-reparametrized score: (x rho(x) + 1/2) / sqrt(x).
double gamma_score(const ScoredDensity& d, double x);

// J_st against gamma(alpha, lambda):
//   (1/lambda) Int p(u) u (rho(u) + lambda - (alpha-1)/u)^2 du  >= 0,
// zero iff p is the gamma(alpha, lambda) density.
double standardized_gamma_fisher(const ScoredDensity& d, double alpha, double lambda,
                                 double rel_tol = 1e-9);

// Same functional with rate lambda(1+r).
double r_corrected_gamma_fisher(const ScoredDensity& d, double alpha, double lambda,
                                double r, double rel_tol = 1e-9);

// variance * Int p(y) (rho(y) + (y - mean)/variance)^2 dy >= 0, zero iff normal.
double standardized_gaussian_fisher(const ScoredDensity& d, double mean, double variance,
                                    double rel_tol = 1e-9);

struct FisherReport {
    double j_standardized = 0.0;
    double i_r_corrected = 0.0;
    double alpha = 0.0;
    double r = 0.0;
    std::string route;  // "quadrature" | "mc" | "closed_form"
};

FisherReport fisher_report(const ScoredDensity& d, double alpha, double lambda, double r,
                           std::string route = "quadrature");

}  // namespace gammachan
