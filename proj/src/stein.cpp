#include "gammachan/stein.hpp"

#include <cmath>
#include <stdexcept>

namespace gammachan {

namespace {

MonteCarloEstimate batch_mean(const std::vector<double>& values) {
    const std::size_t n = values.size();
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double se = n > 1 ? std::sqrt(ss / (static_cast<double>(n) * (n - 1.0))) : 0.0;
    return MonteCarloEstimate{mean, se, n, 0};
}

}  // namespace

const std::vector<TestFunction>& standard_test_functions() {
    static const std::vector<TestFunction> fns = {
        {"one", [](double) { return 1.0; }, [](double) { return 0.0; }},
        {"x", [](double x) { return x; }, [](double) { return 1.0; }},
        {"x^2", [](double x) { return x * x; }, [](double x) { return 2.0 * x; }},
        {"exp(-x)", [](double x) { return std::exp(-x); },
         [](double x) { return -std::exp(-x); }},
        {"cos", [](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); }},
        {"sin", [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); }},
        {"sigmoid", [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
         [](double x) {
             const double s = 1.0 / (1.0 + std::exp(-x));
             return s * (1.0 - s);
         }},
    };
    return fns;
}

MonteCarloEstimate stein_residual_gaussian(const std::vector<double>& batch,
                                           const TestFunction& phi) {
    if (batch.empty()) {
        throw std::invalid_argument("stein_residual_gaussian: empty batch");
    }
    std::vector<double> vals(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        vals[i] = phi.f_prime(batch[i]) - batch[i] * phi.f(batch[i]);
    }
    return batch_mean(vals);
}

MonteCarloEstimate stein_residual_gamma(const std::vector<double>& batch, double alpha,
                                        double lambda, const TestFunction& phi) {
    if (batch.empty()) {
        throw std::invalid_argument("stein_residual_gamma: empty batch");
    }
    if (!(alpha > 0.0) || !(lambda > 0.0)) {
        throw std::invalid_argument("stein_residual_gamma: alpha and lambda must be > 0");
    }
    std::vector<double> vals(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double x = batch[i];
        if (!(x > 0.0)) {
            throw std::invalid_argument("stein_residual_gamma: batch values must be > 0");
        }
        vals[i] = (lambda * x - alpha) * phi.f(x) - x * phi.f_prime(x);
    }
    return batch_mean(vals);
}

double gamma_score(const ScoredDensity& d, double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("gamma_score: x must be > 0");
    }
    return (x * d.score(x) + 0.5) / std::sqrt(x);
}

double standardized_gamma_fisher(const ScoredDensity& d, double alpha, double lambda,
                                 double rel_tol) {
    if (!(alpha >= 0.5)) {
        throw std::domain_error("standardized_gamma_fisher: alpha must be >= 1/2");
    }
    if (!(lambda > 0.0)) {
        throw std::domain_error("standardized_gamma_fisher: lambda must be > 0");
    }
    auto grid = QuadratureGrid::log_spaced(d.lo, d.hi, 1e-12, rel_tol);
    const auto f = [&d, alpha, lambda](double u) {
        const double p = std::exp(d.log_pdf(u));
        if (p <= 0.0) return 0.0;
        const double g = d.score(u) + lambda - (alpha - 1.0) / u;
        return p * u * g * g / lambda;
    };
    return integrate_checked(f, grid);
}

double r_corrected_gamma_fisher(const ScoredDensity& d, double alpha, double lambda,
                                double r, double rel_tol) {
    if (!(r >= 0.0)) {
        throw std::domain_error("r_corrected_gamma_fisher: r must be >= 0");
    }
    auto grid = QuadratureGrid::log_spaced(d.lo, d.hi, 1e-12, rel_tol);
    const double rate = lambda * (1.0 + r);
    const auto f = [&d, alpha, lambda, rate](double u) {
        const double p = std::exp(d.log_pdf(u));
        if (p <= 0.0) return 0.0;
        const double g = d.score(u) + rate - (alpha - 1.0) / u;
        return p * u * g * g / lambda;
    };
    return integrate_checked(f, grid);
}

double standardized_gaussian_fisher(const ScoredDensity& d, double mean, double variance,
                                    double rel_tol) {
    if (!(variance > 0.0)) {
        throw std::domain_error("standardized_gaussian_fisher: variance must be > 0");
    }
    const auto f = [&d, mean, variance](double y) {
        const double p = std::exp(d.log_pdf(y));
        if (p <= 0.0) return 0.0;
        const double g = d.score(y) + (y - mean) / variance;
        return p * g * g * variance;
    };
    const auto res = integrate(f, d.lo, d.hi, rel_tol);
    return res.value;
}

FisherReport fisher_report(const ScoredDensity& d, double alpha, double lambda, double r,
                           std::string route) {
    FisherReport rep;
    rep.alpha = alpha;
    rep.r = r;
    rep.route = std::move(route);
    rep.j_standardized = standardized_gamma_fisher(d, alpha, lambda);
    rep.i_r_corrected = r_corrected_gamma_fisher(d, alpha, lambda, r);
    return rep;
}

}  // namespace gammachan
