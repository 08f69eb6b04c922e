#include <cmath>

#include <doctest.h>

#include "gammachan/errors.hpp"
#include "gammachan/quadrature.hpp"
#include "gammachan/specfun.hpp"

using namespace gammachan;

TEST_CASE("adaptive rule hits analytic integrals") {
    const auto g = integrate([](double x) { return std::exp(-x * x); }, -10.0, 10.0, 1e-12);
    CHECK(g.converged);
    CHECK(g.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));

    const auto p = integrate([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12);
    CHECK(p.value == doctest::Approx(2.0).epsilon(1e-12));

    // integrable endpoint singularity
    const auto s = integrate([](double x) { return 1.0 / std::sqrt(x); }, 1e-300, 1.0, 1e-10);
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("error estimate brackets the true error") {
    const auto res = integrate([](double x) { return std::cos(17.0 * x); }, 0.0, 2.0, 1e-10);
    const double exact = std::sin(34.0) / 17.0;
    CHECK(std::fabs(res.value - exact) <= std::max(res.abs_error, 1e-13));
}

TEST_CASE("log-spaced grid integrates gamma densities over many decades") {
    // shape 0.6 has an x^{-0.4} singularity at zero; the x^a lower tail keeps
    // ~1e-7 of mass below 1e-12, so compare against the incomplete gamma
    const double a = 0.6, b = 2.0;
    const auto grid = QuadratureGrid::log_spaced(1e-12, 60.0, 1e-13, 1e-10);
    const double lg = std::lgamma(a);
    const auto f = [&](double x) {
        return std::exp(a * std::log(b) + (a - 1.0) * std::log(x) - b * x - lg);
    };
    const auto res = integrate(f, grid);
    CHECK(res.converged);
    const double expected = reg_lower_gamma(a, b * 60.0) - reg_lower_gamma(a, b * 1e-12);
    CHECK(res.value == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("integrate_checked raises on hopeless integrands") {
    QuadratureGrid grid = QuadratureGrid::log_spaced(1e-6, 10.0, 1e-13, 1e-12);
    grid.rel_tol = 1e-13;
    int calls = 0;
    const auto nasty = [&calls](double x) {
        ++calls;
        // deterministic pseudo-noise that no refinement can resolve
        return 1.0 + 0.5 * std::sin(1e9 * x) * std::sin(7e8 * x + 1.0);
    };
    CHECK_THROWS_AS(integrate_checked(nasty, grid, 1e-12), AccuracyError);
    CHECK(calls < 2000000);  // refinement gives up rather than spinning
}

TEST_CASE("Gauss-Legendre nodes integrate polynomials exactly") {
    for (int n : {2, 4, 8, 16, 64}) {
        const GaussLegendre gl = gauss_legendre(n);
        REQUIRE(static_cast<int>(gl.x.size()) == n);
        double wsum = 0.0;
        for (double w : gl.w) wsum += w;
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-13));
        // degree 2n-1 monomial on [-1,1]
        const int k = 2 * n - 2;  // even degree so the integral is nonzero
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += gl.w[i] * std::pow(gl.x[i], k);
        CHECK(acc == doctest::Approx(2.0 / (k + 1)).epsilon(1e-11));
    }
}

TEST_CASE("Gauss-Legendre endpoints and symmetry") {
    const GaussLegendre gl = gauss_legendre(33);
    for (std::size_t i = 0; i + 1 < gl.x.size(); ++i) {
        CHECK(gl.x[i] < gl.x[i + 1]);
    }
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
        CHECK(gl.x[i] == doctest::Approx(-gl.x[gl.x.size() - 1 - i]).epsilon(1e-13));
        CHECK(gl.w[i] == doctest::Approx(gl.w[gl.x.size() - 1 - i]).epsilon(1e-13));
    }
}
