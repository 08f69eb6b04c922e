#include "gammachan/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gammachan {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

// SplitMix64 finalizer; full-period mix of a 64-bit word.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed) ^ mix64(stream ^ 0xA5A5A5A5A5A5A5A5ULL))) {}

std::uint64_t CounterRng::next_u64() {
    return mix64(key_ ^ mix64(ctr_++));
}

double CounterRng::uniform() {
    // 53-bit mantissa in (0,1); the +0.5 offset excludes both endpoints.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    cached_normal_ = rad * std::sin(kTwoPi * u2);
    has_cached_normal_ = true;
    return rad * std::cos(kTwoPi * u2);
}

double CounterRng::gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) {
        throw std::invalid_argument("CounterRng::gamma: shape and rate must be > 0");
    }
    // Marsaglia-Tsang for shape >= 1; shape < 1 boosted via G(a) = G(a+1) U^{1/a}.
    double boost = 1.0;
    double a = shape;
    if (a < 1.0) {
        boost = std::pow(uniform(), 1.0 / a);
        a += 1.0;
    }
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return boost * d * v / rate;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return boost * d * v / rate;
    }
}

}  // namespace gammachan
