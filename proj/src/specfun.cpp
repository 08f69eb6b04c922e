#include "gammachan/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gammachan/errors.hpp"

namespace gammachan {

double log_gamma(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("log_gamma: x must be > 0, got " + std::to_string(x));
    }
    return std::lgamma(x);
}

double digamma(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("digamma: x must be > 0, got " + std::to_string(x));
    }
    // Shift up to x >= 6, then the Bernoulli asymptotic series.
    double acc = 0.0;
    while (x < 6.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Coefficients of -B_{2n}/(2n): series psi(x) ~ ln x - 1/(2x) - sum B_{2n}/(2n x^{2n}).
    double series = -1.0 / 12.0;
    double p = inv2;
    double tail = series * p;
    p *= inv2; tail += (1.0 / 120.0) * p;
    p *= inv2; tail += (-1.0 / 252.0) * p;
    p *= inv2; tail += (1.0 / 240.0) * p;
    p *= inv2; tail += (-1.0 / 132.0) * p;
    p *= inv2; tail += (691.0 / 32760.0) * p;
    p *= inv2; tail += (-1.0 / 12.0) * p;
    return acc + std::log(x) - 0.5 * inv + tail;
}

namespace {

constexpr double kPi = 3.14159265358979323846;

// ln of sum_k (z^2/4)^k / (k! Gamma(nu+k+1)); the scaled power-series core.
double log_series_sum(double nu, double z) {
    const double q = 0.25 * z * z;
    double term = std::exp(-std::lgamma(nu + 1.0));
    double sum = term;
    for (int k = 1; k < 600; ++k) {
        term *= q / (k * (nu + k));
        sum += term;
        if (term < sum * 1e-18 && k > 0.5 * z) break;
    }
    return std::log(sum);
}

// ln of the large-z correction series sum_k (-1)^k a_k(nu)/z^k, truncated at
// its smallest term (the expansion is asymptotic, not convergent).
double log_asymptotic_sum(double nu, double z) {
    const double mu = 4.0 * nu * nu;
    double sum = 1.0;
    double term = 1.0;
    double prev_mag = 1.0;
    for (int k = 1; k < 40; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (8.0 * k * z);
        const double mag = std::fabs(term);
        if (mag > prev_mag) break;
        sum += term;
        prev_mag = mag;
        if (mag < 1e-18 * std::fabs(sum)) break;
    }
    return std::log(sum);
}

}  // namespace

double log_bessel_i(double nu, double z) {
    if (nu < -0.5) {
        throw std::domain_error("log_bessel_i: nu must be >= -1/2, got " + std::to_string(nu));
    }
    if (z < 0.0) {
        throw std::domain_error("log_bessel_i: z must be >= 0, got " + std::to_string(z));
    }
    if (z == 0.0) {
        if (nu < 0.0) {
            throw std::domain_error("log_bessel_i: z = 0 diverges for nu < 0");
        }
        return nu == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    const double zstar = 30.0 + 2.0 * std::fabs(nu);
    if (z <= zstar) {
        return nu * std::log(0.5 * z) + log_series_sum(nu, z);
    }
    return z - 0.5 * std::log(2.0 * kPi * z) + log_asymptotic_sum(nu, z);
}

double log_bessel_i_derivative(double nu, double z) {
    if (nu < -0.5) {
        throw std::domain_error("log_bessel_i_derivative: nu must be >= -1/2");
    }
    if (!(z > 0.0)) {
        throw std::domain_error("log_bessel_i_derivative: z must be > 0");
    }
    if (nu >= 0.5) {
        return std::exp(log_bessel_i(nu - 1.0, z) - log_bessel_i(nu, z)) - nu / z;
    }
    const double zstar = 30.0 + 2.0 * std::fabs(nu);
    if (z <= zstar) {
        // I'_nu/I_nu = nu/z + (z/2) S2/S0 with S2 the index-shifted series sum.
        const double s0 = log_series_sum(nu, z);
        const double s2 = log_series_sum(nu + 1.0, z);
        return nu / z + 0.5 * z * std::exp(s2 - s0);
    }
    // I'_nu = I_{nu+1} + (nu/z) I_nu holds for all nu.
    return std::exp(log_bessel_i(nu + 1.0, z) - log_bessel_i(nu, z)) + nu / z;
}

double reg_lower_gamma(double a, double x) {
    if (!(a > 0.0)) {
        throw std::domain_error("reg_lower_gamma: a must be > 0");
    }
    if (x < 0.0) {
        throw std::domain_error("reg_lower_gamma: x must be >= 0");
    }
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // Lower series P(a,x) = x^a e^-x / Gamma(a) * sum_n x^n / (a)_{n+1}.
        double ap = a;
        double term = 1.0 / a;
        double sum = term;
        for (int n = 0; n < 1000; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-16) {
                return sum * std::exp(-x + a * std::log(x) - lg);
            }
        }
        throw AccuracyError("reg_lower_gamma: series failed to converge");
    }
    // Continued fraction for Q(a,x), modified Lentz.
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) {
            const double q = std::exp(-x + a * std::log(x) - lg) * h;
            return 1.0 - q;
        }
    }
    throw AccuracyError("reg_lower_gamma: continued fraction failed to converge");
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

}  // namespace gammachan
