#include "gammachan/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gammachan/specfun.hpp"

namespace gammachan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLnTwoPi = 1.83787706640934548356;

void check_gamma_params(const GammaParams& p, const char* who) {
    if (!(p.shape > 0.0) || !(p.rate > 0.0)) {
        throw std::invalid_argument(std::string(who) + ": shape and rate must be > 0");
    }
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

double mixture_log_pdf(const GammaMixtureDist& m, double x) {
    double best = -kInf;
    std::vector<double> terms(m.weights.size());
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
        terms[i] = std::log(m.weights[i]) + gamma_log_pdf(m.components[i], x);
        best = std::max(best, terms[i]);
    }
    if (best == -kInf) return -kInf;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - best);
    return best + std::log(s);
}

}  // namespace

double gamma_log_pdf(const GammaParams& p, double x) {
    if (x <= 0.0) return -kInf;
    return p.shape * std::log(p.rate) - log_gamma(p.shape) +
           (p.shape - 1.0) * std::log(x) - p.rate * x;
}

InputDistribution InputDistribution::gamma(double shape, double rate) {
    GammaDist d{GammaParams{shape, rate}};
    check_gamma_params(d.p, "InputDistribution::gamma");
    return InputDistribution(Value{d});
}

InputDistribution InputDistribution::exponential(double rate) {
    if (!(rate > 0.0)) {
        throw std::invalid_argument("InputDistribution::exponential: rate must be > 0");
    }
    return InputDistribution(Value{ExponentialDist{rate}});
}

InputDistribution InputDistribution::gamma_mixture(std::vector<double> weights,
                                                   std::vector<GammaParams> components) {
    if (weights.empty() || weights.size() != components.size()) {
        throw std::invalid_argument("gamma_mixture: need matching non-empty weights/components");
    }
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("gamma_mixture: weights must be >= 0");
        total += w;
    }
    if (std::fabs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("gamma_mixture: weights must sum to 1, got " + fmt(total));
    }
    for (const auto& c : components) check_gamma_params(c, "gamma_mixture");
    return InputDistribution(Value{GammaMixtureDist{std::move(weights), std::move(components)}});
}

InputDistribution InputDistribution::log_normal(double mu, double sigma) {
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("InputDistribution::log_normal: sigma must be > 0");
    }
    return InputDistribution(Value{LogNormalDist{mu, sigma}});
}

double InputDistribution::log_pdf(double x) const {
    return std::visit(
        [x](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GammaDist>) {
                return gamma_log_pdf(d.p, x);
            } else if constexpr (std::is_same_v<T, ExponentialDist>) {
                return gamma_log_pdf(GammaParams{1.0, d.rate}, x);
            } else if constexpr (std::is_same_v<T, GammaMixtureDist>) {
                return mixture_log_pdf(d, x);
            } else {
                if (x <= 0.0) return -kInf;
                const double z = (std::log(x) - d.mu) / d.sigma;
                return -std::log(x) - std::log(d.sigma) - 0.5 * kLnTwoPi - 0.5 * z * z;
            }
        },
        v_);
}

double InputDistribution::score(double x) const {
    if (!(x > 0.0)) {
        throw std::domain_error("InputDistribution::score: x must be > 0");
    }
    return std::visit(
        [x](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GammaDist>) {
                return (d.p.shape - 1.0) / x - d.p.rate;
            } else if constexpr (std::is_same_v<T, ExponentialDist>) {
                return -d.rate;
            } else if constexpr (std::is_same_v<T, GammaMixtureDist>) {
                // d/dx ln sum w_i p_i = sum w_i p_i rho_i / sum w_i p_i.
                double best = -kInf;
                std::vector<double> lt(d.weights.size());
                for (std::size_t i = 0; i < d.weights.size(); ++i) {
                    lt[i] = std::log(d.weights[i]) + gamma_log_pdf(d.components[i], x);
                    best = std::max(best, lt[i]);
                }
                double num = 0.0, den = 0.0;
                for (std::size_t i = 0; i < lt.size(); ++i) {
                    const double w = std::exp(lt[i] - best);
                    den += w;
                    num += w * ((d.components[i].shape - 1.0) / x - d.components[i].rate);
                }
                return num / den;
            } else {
                return -(1.0 + (std::log(x) - d.mu) / (d.sigma * d.sigma)) / x;
            }
        },
        v_);
}

double InputDistribution::moment(double k) const {
    return std::visit(
        [k](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GammaDist>) {
                if (k <= -d.p.shape) return kInf;
                return std::exp(log_gamma(d.p.shape + k) - log_gamma(d.p.shape) -
                                k * std::log(d.p.rate));
            } else if constexpr (std::is_same_v<T, ExponentialDist>) {
                if (k <= -1.0) return kInf;
                return std::exp(log_gamma(1.0 + k) + k * std::log(1.0 / d.rate));
            } else if constexpr (std::is_same_v<T, GammaMixtureDist>) {
                double s = 0.0;
                for (std::size_t i = 0; i < d.weights.size(); ++i) {
                    if (k <= -d.components[i].shape) return kInf;
                    s += d.weights[i] *
                         std::exp(log_gamma(d.components[i].shape + k) -
                                  log_gamma(d.components[i].shape) -
                                  k * std::log(d.components[i].rate));
                }
                return s;
            } else {
                return std::exp(k * d.mu + 0.5 * k * k * d.sigma * d.sigma);
            }
        },
        v_);
}

double InputDistribution::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    return std::visit(
        [x](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GammaDist>) {
                return reg_lower_gamma(d.p.shape, d.p.rate * x);
            } else if constexpr (std::is_same_v<T, ExponentialDist>) {
                return -std::expm1(-d.rate * x);
            } else if constexpr (std::is_same_v<T, GammaMixtureDist>) {
                double s = 0.0;
                for (std::size_t i = 0; i < d.weights.size(); ++i) {
                    s += d.weights[i] *
                         reg_lower_gamma(d.components[i].shape, d.components[i].rate * x);
                }
                return s;
            } else {
                return normal_cdf((std::log(x) - d.mu) / d.sigma);
            }
        },
        v_);
}

double InputDistribution::quantile(double q) const {
    if (!(q > 0.0) || !(q < 1.0)) {
        throw std::domain_error("InputDistribution::quantile: q must be in (0,1)");
    }
    double hi = std::max(1.0, mean());
    while (cdf(hi) < q) {
        hi *= 2.0;
        if (hi > 1e300) return hi;
    }
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (cdf(mid) < q ? lo : hi) = mid;
        if (hi - lo < 1e-14 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

double InputDistribution::mgf_window() const {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GammaDist>) {
                return d.p.rate;
            } else if constexpr (std::is_same_v<T, ExponentialDist>) {
                return d.rate;
            } else if constexpr (std::is_same_v<T, GammaMixtureDist>) {
                double w = kInf;
                for (const auto& c : d.components) w = std::min(w, c.rate);
                return w;
            } else {
                return 0.0;  // lognormal MGF diverges for every t > 0
            }
        },
        v_);
}

double InputDistribution::mgf(double t) const {
    if (t == 0.0) return 1.0;
    if (t < 0.0 || t >= mgf_window()) {
        throw std::domain_error("InputDistribution::mgf: t outside validity window");
    }
    return std::visit(
        [t](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GammaDist>) {
                return std::pow(1.0 - t / d.p.rate, -d.p.shape);
            } else if constexpr (std::is_same_v<T, ExponentialDist>) {
                return 1.0 / (1.0 - t / d.rate);
            } else if constexpr (std::is_same_v<T, GammaMixtureDist>) {
                double s = 0.0;
                for (std::size_t i = 0; i < d.weights.size(); ++i) {
                    s += d.weights[i] *
                         std::pow(1.0 - t / d.components[i].rate, -d.components[i].shape);
                }
                return s;
            } else {
                return std::numeric_limits<double>::quiet_NaN();  // unreachable
            }
        },
        v_);
}

std::pair<double, double> InputDistribution::support(double tail_mass) const {
    return {quantile(tail_mass), quantile(1.0 - tail_mass)};
}

double InputDistribution::draw(CounterRng& rng) const {
    return std::visit(
        [&rng](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GammaDist>) {
                return rng.gamma(d.p.shape, d.p.rate);
            } else if constexpr (std::is_same_v<T, ExponentialDist>) {
                return rng.gamma(1.0, d.rate);
            } else if constexpr (std::is_same_v<T, GammaMixtureDist>) {
                double u = rng.uniform();
                std::size_t i = 0;
                for (; i + 1 < d.weights.size(); ++i) {
                    if (u < d.weights[i]) break;
                    u -= d.weights[i];
                }
                return rng.gamma(d.components[i].shape, d.components[i].rate);
            } else {
                return std::exp(d.mu + d.sigma * rng.normal());
            }
        },
        v_);
}

std::vector<double> InputDistribution::sample(std::size_t n, std::uint64_t seed,
                                              std::uint64_t stream) const {
    CounterRng rng(seed, stream);
    std::vector<double> out(n);
    for (auto& x : out) x = draw(rng);
    return out;
}

std::string InputDistribution::id() const {
    return std::visit(
        [](const auto& d) -> std::string {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GammaDist>) {
                return "gamma(" + fmt(d.p.shape) + "," + fmt(d.p.rate) + ")";
            } else if constexpr (std::is_same_v<T, ExponentialDist>) {
                return "exp(" + fmt(d.rate) + ")";
            } else if constexpr (std::is_same_v<T, GammaMixtureDist>) {
                std::string s = "mix(";
                for (std::size_t i = 0; i < d.weights.size(); ++i) {
                    if (i) s += "+";
                    s += fmt(d.weights[i]) + "*g(" + fmt(d.components[i].shape) + "," +
                         fmt(d.components[i].rate) + ")";
                }
                return s + ")";
            } else {
                return "lognormal(" + fmt(d.mu) + "," + fmt(d.sigma) + ")";
            }
        },
        v_);
}

double gamma_relative_entropy(const GammaParams& from, const GammaParams& to) {
    check_gamma_params(from, "gamma_relative_entropy");
    check_gamma_params(to, "gamma_relative_entropy");
    return (from.shape - to.shape) * digamma(from.shape) + log_gamma(to.shape) -
           log_gamma(from.shape) + to.shape * (std::log(from.rate) - std::log(to.rate)) +
           from.shape * (to.rate - from.rate) / from.rate;
}

ScoredDensity scored_density(const InputDistribution& dist, double tail_mass) {
    const auto [lo, hi] = dist.support(tail_mass);
    return ScoredDensity{
        [dist](double x) { return dist.log_pdf(x); },
        [dist](double x) { return dist.score(x); },
        lo, hi};
}

ScoredDensity scaled_density(const ScoredDensity& d, double a) {
    if (!(a > 0.0)) {
        throw std::invalid_argument("scaled_density: a must be > 0");
    }
    const double ln_a = std::log(a);
    return ScoredDensity{
        [d, a, ln_a](double u) { return d.log_pdf(u / a) - ln_a; },
        [d, a](double u) { return d.score(u / a) / a; },
        d.lo * a, d.hi * a};
}

}  // namespace gammachan
