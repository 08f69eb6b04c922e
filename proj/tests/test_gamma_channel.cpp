#include <cmath>
#include <cstdio>

#include <doctest.h>

#include "gammachan/errors.hpp"
#include "gammachan/gamma_channel.hpp"
#include "gammachan/identity_lab.hpp"
#include "gammachan/quadrature.hpp"
#include "gammachan/specfun.hpp"

using namespace gammachan;

namespace {

const InputDistribution kMix = InputDistribution::gamma_mixture(
    {0.5, 0.5}, {GammaParams{2.0, 4.0}, GammaParams{3.0, 2.0}});

// same gamma law routed through the mixture branch, forcing the quadrature
// marginal instead of the closed form
InputDistribution opaque_gamma(double shape, double rate) {
    return InputDistribution::gamma_mixture({1.0}, {GammaParams{shape, rate}});
}

double kernel_moment(const ChannelParams& p, double x, int k) {
    const auto cond = conditional_density(p, x);
    const auto grid = QuadratureGrid::log_spaced(cond.lo, cond.hi, 1e-13, 1e-10);
    return integrate(
               [&](double u) {
                   const double lp = cond.log_pdf(u);
                   if (!std::isfinite(lp)) return 0.0;
                   return std::exp(lp) * std::pow(u, k);
               },
               grid)
        .value;
}

}  // namespace

TEST_CASE("parameter validation rejects out-of-domain channels") {
    CHECK_THROWS(validate(ChannelParams{0.49, 1.0, 1.0}));
    CHECK_THROWS(validate(ChannelParams{1.0, 0.0, 1.0}));
    CHECK_THROWS(validate(ChannelParams{1.0, 1.0, -0.1}));
    CHECK_NOTHROW(validate(ChannelParams{0.5, 1.0, 0.0}));
}

TEST_CASE("sampled records satisfy the structural constraints") {
    const ChannelParams p{1.3, 0.8, 1.7};
    const auto recs = channel_sample(InputDistribution::gamma(2.0, 1.0), p, 20000, 42);
    for (const auto& rec : recs) {
        CHECK(rec.x > 0.0);
        CHECK(rec.x_r >= 0.0);
        CHECK(std::fabs(rec.v_r) <= 1.0);
        CHECK(rec.x_r == doctest::Approx(rec.g + rec.y_r * rec.y_r).epsilon(1e-12));
    }
    CHECK(channel_sample(InputDistribution::gamma(2.0, 1.0), p, 100, 42).size() == 100);
}

TEST_CASE("alpha = 1/2 collapses the gamma part: v_r is exactly a sign") {
    const ChannelParams p{0.5, 1.0, 1.0};
    const auto recs = channel_sample(InputDistribution::gamma(0.5, 1.0), p, 5000, 8);
    for (const auto& rec : recs) {
        CHECK(rec.g == 0.0);
        CHECK(std::fabs(rec.v_r) == 1.0);
    }
}

TEST_CASE("r = 0 output is the pure gamma law") {
    const ChannelParams p{1.5, 2.0, 0.0};
    const std::size_t n = 30000;
    auto recs = channel_sample(InputDistribution::gamma(3.0, 1.0), p, n, 99);
    std::vector<double> us;
    us.reserve(n);
    for (const auto& rec : recs) us.push_back(rec.x_r);
    const double stat = ks_statistic(
        std::move(us), [&](double u) { return reg_lower_gamma(1.5, 2.0 * u); });
    CHECK(stat < ks_critical_value(0.01, n));
}

TEST_CASE("gamma input with matching shape flows to a rescaled gamma") {
    const double alpha = 1.0, lambda = 1.0, nu = 2.5, r = 1.5;
    const ChannelParams p{alpha, lambda, r};
    const ChannelMarginal marg(InputDistribution::gamma(alpha, nu), p);
    REQUIRE(marg.closed_form());
    const double expected_rate = 1.0 / (r / nu + 1.0 / lambda);
    CHECK(marg.closed_params().shape == doctest::Approx(alpha).epsilon(1e-12));
    CHECK(marg.closed_params().rate == doctest::Approx(expected_rate).epsilon(1e-12));

    const std::size_t n = 30000;
    auto recs = channel_sample(InputDistribution::gamma(alpha, nu), p, n, 7);
    std::vector<double> us;
    us.reserve(n);
    for (const auto& rec : recs) us.push_back(rec.x_r);
    const double stat = ks_statistic(std::move(us), [&](double u) {
        return reg_lower_gamma(alpha, expected_rate * u);
    });
    CHECK(stat < ks_critical_value(0.01, n));
}

TEST_CASE("conditional kernel is a probability density with the stated moments") {
    for (const ChannelParams& p :
         {ChannelParams{0.6, 1.0, 0.5}, ChannelParams{1.0, 1.0, 1.0},
          ChannelParams{2.0, 0.5, 2.0}}) {
        for (double x : {0.2, 1.0, 4.0}) {
            CHECK(kernel_moment(p, x, 0) == doctest::Approx(1.0).epsilon(1e-8));
            CHECK(kernel_moment(p, x, 1) ==
                  doctest::Approx(p.alpha / p.lambda + p.r * x).epsilon(1e-8));
            const double m1 = p.alpha / p.lambda + p.r * x;
            const double var = p.alpha / (p.lambda * p.lambda) + 2.0 * p.r * x / p.lambda;
            CHECK(kernel_moment(p, x, 2) - m1 * m1 == doctest::Approx(var).epsilon(1e-6));
            CHECK(conditional_mean(p, x) == doctest::Approx(m1).epsilon(1e-12));
            CHECK(conditional_variance(p, x) == doctest::Approx(var).epsilon(1e-12));
        }
    }
}

TEST_CASE("conditional kernel at x = 0 degenerates to the channel gamma") {
    const ChannelParams p{1.2, 2.0, 3.0};
    for (double u : {0.1, 0.7, 2.5}) {
        CHECK(conditional_log_density(p, 0.0, u) ==
              doctest::Approx(gamma_log_pdf({1.2, 2.0}, u)).epsilon(1e-12));
    }
}

TEST_CASE("alpha = 1/2 kernel equals the explicit cosh density") {
    const double lambda = 1.4, r = 0.8;
    const ChannelParams p{0.5, lambda, r};
    for (double x : {0.3, 1.1}) {
        for (double u : {0.05, 0.9, 3.7}) {
            const double z = 2.0 * lambda * std::sqrt(u * r * x);
            const double lcosh = z + std::log1p(std::exp(-2.0 * z)) - std::log(2.0);
            const double expected =
                0.5 * std::log(lambda / (M_PI * u)) - lambda * (u + r * x) + lcosh;
            CHECK(conditional_log_density(p, x, u) ==
                  doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("kernel log-derivative matches finite differences") {
    const ChannelParams p{1.7, 0.9, 1.2};
    for (double x : {0.0, 0.6, 2.0}) {
        for (double u : {0.2, 1.0, 5.0}) {
            const double h = 1e-6 * u;
            const double fd = (conditional_log_density(p, x, u + h) -
                               conditional_log_density(p, x, u - h)) /
                              (2.0 * h);
            CHECK(conditional_log_density_du(p, x, u) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("quadrature marginal agrees with the closed form it cannot see") {
    const double alpha = 1.0, lambda = 1.0, nu = 2.0, r = 1.0;
    const ChannelParams p{alpha, lambda, r};
    const ChannelMarginal closed(InputDistribution::gamma(alpha, nu), p);
    ChannelMarginal generic(opaque_gamma(alpha, nu), p);
    REQUIRE(closed.closed_form());
    REQUIRE(!generic.closed_form());
    for (double u : {0.05, 0.4, 1.3, 4.0, 9.0}) {
        CHECK(generic.log_density(u) ==
              doctest::Approx(closed.log_density(u)).epsilon(1e-7));
        CHECK(generic.dlog_density(u) ==
              doctest::Approx(closed.dlog_density(u)).epsilon(1e-6));
    }
    generic.build_grid(1024);
    REQUIRE(generic.has_grid());
    for (double u : {0.1, 0.8, 2.2, 6.5}) {
        CHECK(generic.log_density_fast(u) ==
              doctest::Approx(closed.log_density(u)).epsilon(1e-5));
    }
}

TEST_CASE("quadrature marginal normalizes for a true mixture input") {
    const ChannelParams p{1.0, 1.0, 0.7};
    const ChannelMarginal marg(kMix, p);
    REQUIRE(!marg.closed_form());
    const auto sd = marg.as_scored_density();
    const auto grid = QuadratureGrid::log_spaced(sd.lo, sd.hi, 1e-13, 1e-9);
    const double mass = integrate(
                            [&](double u) {
                                const double lp = sd.log_pdf(u);
                                return std::isfinite(lp) ? std::exp(lp) : 0.0;
                            },
                            grid)
                            .value;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-7));
    for (double u : {0.3, 1.0, 3.0}) {
        const double h = 1e-5;
        const double fd = (sd.log_pdf(u + h) - sd.log_pdf(u - h)) / (2.0 * h);
        CHECK(sd.score(u) == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("marginal grid cache round-trips through disk") {
    const ChannelParams p{1.0, 1.0, 0.5};
    ChannelMarginal a(kMix, p);
    a.build_grid(512);
    const std::string path = "/tmp/gammachan_test_cache.bin";
    a.save_cache(path);
    ChannelMarginal b(kMix, p);
    REQUIRE(b.load_cache(path));
    REQUIRE(b.has_grid());
    for (double u : {0.2, 1.1, 4.4}) {
        CHECK(b.log_density_fast(u) == doctest::Approx(a.log_density_fast(u)).epsilon(1e-14));
    }
    // wrong parameters must refuse the cache
    ChannelMarginal c(kMix, ChannelParams{1.0, 1.0, 0.75});
    CHECK(!c.load_cache(path));
    std::remove(path.c_str());
}

TEST_CASE("channel MGF factorizes over the input MGF") {
    const ChannelParams p{1.5, 2.0, 1.0};
    const auto d = InputDistribution::gamma(2.0, 3.0);
    const double window = channel_mgf_window(d, p);
    CHECK(window == doctest::Approx(2.0 / (2.0 / 3.0 + 1.0)).epsilon(1e-12));
    CHECK(channel_mgf(d, p, 0.0) == 1.0);
    CHECK_THROWS(channel_mgf(d, p, window * 1.01));

    // Monte Carlo cross-check at an interior point
    const double t = 0.4 * window;
    const auto recs = channel_sample(d, p, 200000, 123);
    double acc = 0.0;
    for (const auto& rec : recs) acc += std::exp(t * rec.x_r);
    const double emp = acc / recs.size();
    CHECK(channel_mgf(d, p, t) == doctest::Approx(emp).epsilon(0.02));
}

TEST_CASE("binned regression recovers the matched-gamma conditional expectation") {
    // E[sqrt(rX) V_r | X_r = u] = (r/(1+r)) sqrt(u) for gamma(alpha, lambda) input
    const double alpha = 1.0, lambda = 1.0, r = 1.0;
    const ChannelParams p{alpha, lambda, r};
    const auto recs = channel_sample(InputDistribution::gamma(alpha, lambda), p, 400000, 31);
    const auto reg = binned_conditional_expectation(
        recs, [](const ChannelRecord& rec) { return std::sqrt(rec.x * 1.0) * rec.v_r; }, 60);
    int hits = 0, total = 0;
    for (std::size_t b = 0; b < reg.mean.size(); ++b) {
        const double at = 0.5 * (reg.edges[b] + reg.edges[b + 1]);
        const double oracle = (r / (1.0 + r)) * std::sqrt(at);
        // binning bias dominates in the outer bins; count interior hits
        if (reg.mass[b] < 1e-3) continue;
        ++total;
        if (std::fabs(reg.mean[b] - oracle) < 5.0 * reg.se[b] + 0.02 * oracle) ++hits;
    }
    CHECK(total >= 30);
    CHECK(hits >= total * 9 / 10);
}

TEST_CASE("point-mass conditional mean of V matches the tanh law at alpha = 1/2") {
    const double lambda = 1.0, r = 2.0, x = 1.0;
    const ChannelParams p{0.5, lambda, r};
    const auto recs = channel_sample_at(x, p, 400000, 17);
    const auto reg = binned_conditional_expectation(
        recs, [](const ChannelRecord& rec) { return rec.v_r; }, 50);
    int hits = 0, total = 0;
    for (std::size_t b = 0; b < reg.mean.size(); ++b) {
        const double at = 0.5 * (reg.edges[b] + reg.edges[b + 1]);
        const double oracle = std::tanh(2.0 * lambda * std::sqrt(at * r * x));
        ++total;
        if (std::fabs(reg.mean[b] - oracle) < 5.0 * reg.se[b] + 0.01) ++hits;
    }
    CHECK(hits >= total * 9 / 10);
}

TEST_CASE("binned regression rejects degenerate setups") {
    const ChannelParams p{1.0, 1.0, 1.0};
    const auto recs = channel_sample(InputDistribution::gamma(1.0, 1.0), p, 200, 1);
    CHECK_THROWS_AS(binned_conditional_expectation(
                        recs, [](const ChannelRecord& rec) { return rec.v_r; }, 5),
                    std::invalid_argument);
    CHECK_THROWS_AS(binned_conditional_expectation(
                        recs, [](const ChannelRecord& rec) { return rec.v_r; }, 100),
                    AccuracyError);
}

TEST_CASE("Fisher information routes agree with the closed form") {
    const double alpha = 1.0, lambda = 1.0, r = 1.0;
    const ChannelParams p{alpha, lambda, r};
    const auto d = InputDistribution::gamma(alpha, lambda);
    const double closed = alpha * r * r / (1.0 + r);

    CHECK(channel_jst_quadrature(d, p) == doctest::Approx(closed).epsilon(1e-9));

    const auto mc = channel_jst_mc(d, p, 400000, 2024, 0);
    CHECK(mc.value == doctest::Approx(closed).epsilon(0.03));

    // rate-mismatched gamma input: alpha c^2 r^2 / (1 + c r), c = lambda/nu
    const double nu = 2.0, c = lambda / nu;
    const auto dmis = InputDistribution::gamma(alpha, nu);
    CHECK(channel_jst_quadrature(dmis, p) ==
          doctest::Approx(alpha * c * c * r * r / (1.0 + c * r)).epsilon(1e-9));

    // rescaled-variable functional: alpha r^2 (c-1)^2 / ((1+cr)(1+r))
    CHECK(channel_jst_rescaled(dmis, p) ==
          doctest::Approx(alpha * r * r * (c - 1.0) * (c - 1.0) / ((1.0 + c * r) * (1.0 + r)))
              .epsilon(1e-9));
    CHECK(channel_jst_rescaled(d, p) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("quadrature jst works through the generic marginal too") {
    const ChannelParams p{1.0, 1.0, 0.5};
    const double direct = channel_jst_rescaled(kMix, p);
    CHECK(direct >= 0.0);
    // cross-route: two-rate map applied to the rescaled functional
    const double jq = channel_jst_quadrature(kMix, p);
    const auto mc = channel_jst_mc(kMix, p, 400000, 555, 0);
    CHECK(mc.value == doctest::Approx(jq).epsilon(0.05));
}

TEST_CASE("score representation gap vanishes for the matched input") {
    const ChannelParams p{1.0, 1.0, 1.0};
    const auto gap =
        channel_score_representation_gap(InputDistribution::gamma(1.0, 1.0), p, 200000, 12);
    CHECK(std::fabs(gap.value) <= 2e-3 + 4.0 * gap.std_error);
}

TEST_CASE("mutual information: MC and quadrature routes agree") {
    const ChannelParams p{1.0, 1.0, 1.0};
    const auto d = InputDistribution::gamma(1.0, 1.0);
    const double quad = mutual_information_quadrature(d, p);
    const auto mc = mutual_information_mc(d, p, 400000, 2026);
    CHECK(quad > 0.0);
    CHECK(quad <= 1.0 * std::log1p(1.0) + 1e-9);  // alpha ln(1+r) cap
    CHECK(std::fabs(mc.value - quad) <= 4.0 * mc.std_error + 1e-4);
    CHECK(mutual_information_quadrature(d, ChannelParams{1.0, 1.0, 0.0}) == 0.0);
}

TEST_CASE("mutual information MC needs the closed-form marginal") {
    CHECK_THROWS_AS(mutual_information_mc(kMix, ChannelParams{1.0, 1.0, 1.0}, 10000, 1),
                    std::invalid_argument);
}

TEST_CASE("record CSV writer emits one line per draw") {
    const auto recs = channel_sample(InputDistribution::gamma(1.0, 1.0),
                                     ChannelParams{1.0, 1.0, 1.0}, 16, 4);
    const std::string path = "/tmp/gammachan_records_test.csv";
    write_records_csv(recs, path);
    std::FILE* f = std::fopen(path.c_str(), "rb");
    REQUIRE(f != nullptr);
    char line[256];
    REQUIRE(std::fgets(line, sizeof(line), f) != nullptr);
    CHECK(std::string(line) == "x,g,n,y_r,x_r,v_r\n");
    int count = 0;
    while (std::fgets(line, sizeof(line), f)) ++count;
    std::fclose(f);
    std::remove(path.c_str());
    CHECK(count == 16);
}
