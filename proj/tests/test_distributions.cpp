#include <cmath>

#include <doctest.h>

#include "gammachan/distributions.hpp"
#include "gammachan/identity_lab.hpp"
#include "gammachan/quadrature.hpp"
#include "gammachan/specfun.hpp"

using namespace gammachan;

namespace {

const InputDistribution kMix = InputDistribution::gamma_mixture(
    {0.5, 0.5}, {GammaParams{2.0, 4.0}, GammaParams{3.0, 2.0}});

double quad_expect(const InputDistribution& d, const std::function<double(double)>& g) {
    const auto sd = scored_density(d, 1e-13);
    const auto grid = QuadratureGrid::log_spaced(sd.lo, sd.hi, 1e-13, 1e-10);
    return integrate([&](double x) { return std::exp(sd.log_pdf(x)) * g(x); }, grid).value;
}

}  // namespace

TEST_CASE("gamma moments follow the rising-factorial law") {
    const auto d = InputDistribution::gamma(2.5, 3.0);
    CHECK(d.mean() == doctest::Approx(2.5 / 3.0).epsilon(1e-13));
    CHECK(d.moment(2.0) == doctest::Approx(2.5 * 3.5 / 9.0).epsilon(1e-13));
    CHECK(d.moment(3.5) ==
          doctest::Approx(std::exp(log_gamma(6.0) - log_gamma(2.5) - 3.5 * std::log(3.0)))
              .epsilon(1e-12));
}

TEST_CASE("mixture moments are weighted sums") {
    CHECK(kMix.mean() == doctest::Approx(1.0).epsilon(1e-13));  // 0.5*(2/4) + 0.5*(3/2)
    const double m2 = 0.5 * (2.0 * 3.0 / 16.0) + 0.5 * (3.0 * 4.0 / 4.0);
    CHECK(kMix.moment(2.0) == doctest::Approx(m2).epsilon(1e-13));
}

TEST_CASE("lognormal moments") {
    const auto d = InputDistribution::log_normal(0.2, 0.6);
    CHECK(d.mean() == doctest::Approx(std::exp(0.2 + 0.18)).epsilon(1e-12));
    CHECK(d.moment(2.0) == doctest::Approx(std::exp(0.4 + 0.72)).epsilon(1e-12));
}

TEST_CASE("densities normalize and match their scores") {
    for (const auto& d :
         {InputDistribution::gamma(0.7, 2.0), InputDistribution::exponential(1.5), kMix,
          InputDistribution::log_normal(0.0, 0.5)}) {
        CHECK(quad_expect(d, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-9));
        for (double x : {0.3, 0.9, 2.2}) {
            const double h = 1e-6 * x;
            const double fd = (d.log_pdf(x + h) - d.log_pdf(x - h)) / (2.0 * h);
            CHECK(d.score(x) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("cdf and quantile round-trip") {
    for (const auto& d : {InputDistribution::gamma(0.5, 1.0), kMix,
                          InputDistribution::log_normal(0.1, 0.8)}) {
        for (double q : {0.01, 0.2, 0.5, 0.9, 0.999}) {
            CHECK(d.cdf(d.quantile(q)) == doctest::Approx(q).epsilon(1e-9));
        }
    }
}

TEST_CASE("sampling matches the law by Kolmogorov-Smirnov") {
    const std::size_t n = 20000;
    std::size_t stream = 0;
    for (const auto& d :
         {InputDistribution::gamma(0.5, 2.0), InputDistribution::gamma(3.0, 1.0),
          InputDistribution::exponential(2.0), kMix,
          InputDistribution::log_normal(0.3, 0.7)}) {
        auto xs = d.sample(n, 20260822, stream++);
        const double stat = ks_statistic(std::move(xs), [&](double x) { return d.cdf(x); });
        CHECK(stat < ks_critical_value(0.01, n));
    }
}

TEST_CASE("sampling is reproducible and stream-separated") {
    const auto d = InputDistribution::gamma(1.2, 0.8);
    CHECK(d.sample(64, 9, 1) == d.sample(64, 9, 1));
    CHECK(d.sample(64, 9, 1) != d.sample(64, 9, 2));
    CHECK(d.sample(64, 9, 1) != d.sample(64, 10, 1));
}

TEST_CASE("moment-generating functions and their windows") {
    const auto g = InputDistribution::gamma(2.0, 3.0);
    CHECK(g.mgf_window() == doctest::Approx(3.0));
    CHECK(g.mgf(0.0) == doctest::Approx(1.0));
    CHECK(g.mgf(1.5) == doctest::Approx(std::pow(1.0 - 0.5, -2.0)).epsilon(1e-12));
    CHECK_THROWS(g.mgf(3.5));

    CHECK(kMix.mgf_window() == doctest::Approx(2.0));  // min component rate
    CHECK(kMix.mgf(1.0) ==
          doctest::Approx(0.5 * std::pow(0.75, -2.0) + 0.5 * std::pow(0.5, -3.0))
              .epsilon(1e-12));

    CHECK(InputDistribution::log_normal(0.0, 1.0).mgf_window() == 0.0);

    // numeric cross-check on the mixture; the e^{0.9x} weight shifts the
    // effective tail, so integrate well past the density's own support
    const auto sd = scored_density(kMix, 1e-13);
    const auto grid = QuadratureGrid::log_spaced(sd.lo, sd.hi + 45.0, 1e-13, 1e-10);
    const double emp =
        integrate([&](double x) { return std::exp(sd.log_pdf(x) + 0.9 * x); }, grid).value;
    CHECK(emp == doctest::Approx(kMix.mgf(0.9)).epsilon(1e-8));
}

TEST_CASE("gamma relative entropy: closed form vs direct integral") {
    const GammaParams from{2.0, 3.0}, to{1.5, 1.0};
    const auto d = InputDistribution::gamma(from.shape, from.rate);
    const double direct = quad_expect(
        d, [&](double x) { return gamma_log_pdf(from, x) - gamma_log_pdf(to, x); });
    CHECK(gamma_relative_entropy(from, to) == doctest::Approx(direct).epsilon(1e-9));
    CHECK(gamma_relative_entropy(to, to) == doctest::Approx(0.0));
}

TEST_CASE("rate-only divergence reduces to alpha (c - 1 - ln c)") {
    // c is the target-to-source rate ratio lambda / nu
    const double alpha = 1.7, lambda = 2.2;
    for (double c : {0.25, 0.8, 1.0, 3.0}) {
        CHECK(gamma_relative_entropy({alpha, lambda / c}, {alpha, lambda}) ==
              doctest::Approx(alpha * (c - 1.0 - std::log(c))).epsilon(1e-12));
    }
}

TEST_CASE("scaled_density is the law of a X") {
    const auto d = InputDistribution::gamma(1.3, 2.0);
    const auto sd = scaled_density(scored_density(d, 1e-13), 4.0);
    const GammaParams q{1.3, 0.5};  // rate / a
    for (double y : {0.5, 2.0, 9.0}) {
        CHECK(sd.log_pdf(y) == doctest::Approx(gamma_log_pdf(q, y)).epsilon(1e-12));
        CHECK(sd.score(y) == doctest::Approx((q.shape - 1.0) / y - q.rate).epsilon(1e-10));
    }
}
