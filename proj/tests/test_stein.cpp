#include <cmath>

#include <doctest.h>

#include "gammachan/distributions.hpp"
#include "gammachan/stein.hpp"

using namespace gammachan;

namespace {

ScoredDensity gamma_density(double shape, double rate) {
    return scored_density(InputDistribution::gamma(shape, rate), 1e-13);
}

}  // namespace

TEST_CASE("the standard test-function family is consistent") {
    const auto& fams = standard_test_functions();
    REQUIRE(fams.size() == 7);
    for (const auto& phi : fams) {
        CHECK(!phi.description.empty());
        for (double x : {-1.3, -0.2, 0.4, 1.1, 2.8}) {
            const double h = 1e-6;
            const double fd = (phi.f(x + h) - phi.f(x - h)) / (2.0 * h);
            CHECK(phi.f_prime(x) == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("Stein residuals vanish on matched batches and not otherwise") {
    const std::size_t n = 60000;
    const auto gamma_batch = InputDistribution::gamma(1.5, 2.0).sample(n, 11, 0);
    for (const auto& phi : standard_test_functions()) {
        const auto est = stein_residual_gamma(gamma_batch, 1.5, 2.0, phi);
        CHECK(std::fabs(est.value) <= 4.0 * est.std_error);
    }
    // shape off by one: residual for phi(x)=x is detectably nonzero
    const auto& linear = standard_test_functions()[1];
    const auto off = stein_residual_gamma(gamma_batch, 2.5, 2.0, linear);
    CHECK(std::fabs(off.value) > 5.0 * off.std_error);

    std::vector<double> normal_batch(n);
    CounterRng rng(12, 0);
    for (auto& v : normal_batch) v = rng.normal();
    for (const auto& phi : standard_test_functions()) {
        const auto est = stein_residual_gaussian(normal_batch, phi);
        CHECK(std::fabs(est.value) <= 4.0 * est.std_error);
    }
    for (auto& v : normal_batch) v += 0.5;
    const auto shifted = stein_residual_gaussian(normal_batch, linear);
    CHECK(std::fabs(shifted.value) > 5.0 * shifted.std_error);
}

TEST_CASE("standardized gamma Fisher information: rate-mismatch closed form") {
    // J against gamma(alpha, lambda) of gamma(alpha, mu) is alpha (lambda-mu)^2 / (mu lambda)
    const double alpha = 1.4, lambda = 2.0;
    for (double a : {0.5, 1.0, 1.75, 4.0}) {
        const double mu = a * lambda;
        const double expected = alpha * (lambda - mu) * (lambda - mu) / (mu * lambda);
        CHECK(standardized_gamma_fisher(gamma_density(alpha, mu), alpha, lambda) ==
              doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("channel-ready special case: rate lambda/(1+r) gives alpha r^2/(1+r)") {
    for (double alpha : {0.5, 1.0, 2.0}) {
        for (double r : {0.5, 1.0, 2.0}) {
            const double lambda = 1.3;
            const auto d = gamma_density(alpha, lambda / (1.0 + r));
            CHECK(standardized_gamma_fisher(d, alpha, lambda) ==
                  doctest::Approx(alpha * r * r / (1.0 + r)).epsilon(1e-9));
        }
    }
}

TEST_CASE("r-corrected variant evaluates against rate lambda (1+r)") {
    const double alpha = 1.0, lambda = 1.0, r = 1.0;
    const auto d = gamma_density(alpha, lambda / (1.0 + r));
    // shifting the rate to lambda (1+r) while keeping the 1/lambda prefactor
    // gives alpha r^2 (r+2)^2 / (1+r) on the channel-output law
    const double expected = alpha * r * r * (r + 2.0) * (r + 2.0) / (1.0 + r);
    CHECK(r_corrected_gamma_fisher(d, alpha, lambda, r) ==
          doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("the two Fisher functionals are linked by the mean") {
    // expanding the shifted square and integrating the score by parts:
    // J = I^r + 2 alpha r - lambda E[U] r (r+2), E[U] the mean under d
    const double alpha = 1.2, lambda = 0.9;
    for (double r : {0.5, 1.5}) {
        for (double mu : {lambda, lambda / (1.0 + r), 2.3}) {
            const auto d = gamma_density(alpha, mu);
            const double j = standardized_gamma_fisher(d, alpha, lambda);
            const double ir = r_corrected_gamma_fisher(d, alpha, lambda, r);
            const double mean = alpha / mu;
            const double rhs = ir + 2.0 * alpha * r - lambda * mean * r * (r + 2.0);
            CHECK(j == doctest::Approx(rhs).epsilon(1e-8));
        }
    }
    // matched law: both sides collapse to zero
    const auto matched = gamma_density(alpha, lambda);
    CHECK(standardized_gamma_fisher(matched, alpha, lambda) ==
          doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("standardized gaussian Fisher information closed form") {
    const auto normal = [](double m, double s2) {
        return ScoredDensity{[m, s2](double y) {
                                 const double z = y - m;
                                 return -0.5 * std::log(2.0 * M_PI * s2) - 0.5 * z * z / s2;
                             },
                             [m, s2](double y) { return -(y - m) / s2; },
                             m - 9.0 * std::sqrt(s2), m + 9.0 * std::sqrt(s2)};
    };
    CHECK(standardized_gaussian_fisher(normal(0.0, 1.0), 0.0, 1.0) ==
          doctest::Approx(0.0).epsilon(1e-10));
    // variance mismatch: (s^2 - 1)^2 / s^2 against a unit target
    CHECK(standardized_gaussian_fisher(normal(0.0, 2.0), 0.0, 1.0) ==
          doctest::Approx(0.5).epsilon(1e-9));
    // mean shift under matched variance: shift^2
    CHECK(standardized_gaussian_fisher(normal(0.7, 1.0), 0.0, 1.0) ==
          doctest::Approx(0.49).epsilon(1e-9));
}

TEST_CASE("sqrt-reparametrized score of the matched gamma law") {
    const double alpha = 2.0, lambda = 1.5;
    const auto d = gamma_density(alpha, lambda);
    for (double x : {0.4, 1.0, 3.0}) {
        const double expected = (alpha - 0.5 - lambda * x) / std::sqrt(x);
        CHECK(gamma_score(d, x) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("fisher_report carries both functionals") {
    const auto d = gamma_density(1.0, 0.5);
    const auto rep = fisher_report(d, 1.0, 1.0, 1.0, "quadrature");
    CHECK(rep.alpha == 1.0);
    CHECK(rep.r == 1.0);
    CHECK(rep.route == "quadrature");
    CHECK(rep.j_standardized ==
          doctest::Approx(standardized_gamma_fisher(d, 1.0, 1.0)).epsilon(1e-10));
    CHECK(rep.i_r_corrected ==
          doctest::Approx(r_corrected_gamma_fisher(d, 1.0, 1.0, 1.0)).epsilon(1e-10));
}
