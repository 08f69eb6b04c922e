#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gammachan/rng.hpp"

namespace gammachan {

struct GammaParams {
    double shape = 1.0;
    double rate = 1.0;
};

struct GammaDist { GammaParams p; };
struct ExponentialDist { double rate = 1.0; };
struct GammaMixtureDist {
    std::vector<double> weights;
    std::vector<GammaParams> components;
};
struct LogNormalDist { double mu = 0.0; double sigma = 1.0; };

// Positive input law fed to the channels. Value-semantic tagged family.
class InputDistribution {
public:
    using Value = std::variant<GammaDist, ExponentialDist, GammaMixtureDist, LogNormalDist>;

    static InputDistribution gamma(double shape, double rate);
    static InputDistribution exponential(double rate);
    static InputDistribution gamma_mixture(std::vector<double> weights,
                                           std::vector<GammaParams> components);
    static InputDistribution log_normal(double mu, double sigma);

    double log_pdf(double x) const;   // -inf outside (0, inf)
    double score(double x) const;     // d/dx ln p, x > 0
    double moment(double k) const;    // E[X^k]; +inf when divergent
    double mean() const { return moment(1.0); }
    double cdf(double x) const;
    double quantile(double q) const;  // q in (0, 1)
    double mgf(double t) const;       // throws outside the validity window
    double mgf_window() const;        // sup of valid t > 0; 0 when none exists

    // Effective support [quantile(tail), quantile(1 - tail)].
    std::pair<double, double> support(double tail_mass = 1e-12) const;

    double draw(CounterRng& rng) const;
    std::vector<double> sample(std::size_t n, std::uint64_t seed,
                               std::uint64_t stream = 0) const;

    std::string id() const;  // compact text tag for report rows
    const Value& value() const { return v_; }

private:
    explicit InputDistribution(Value v) : v_(std::move(v)) {}
    Value v_;
};

// D(gamma(from) || gamma(to)) in closed form.
double gamma_relative_entropy(const GammaParams& from, const GammaParams& to);

// ln of the gamma(shape, rate) density at x > 0.
double gamma_log_pdf(const GammaParams& p, double x);

// Density with its own score and effective support; the common currency the
// Fisher functionals and relative-entropy integrals consume.
struct ScoredDensity {
    std::function<double(double)> log_pdf;
    std::function<double(double)> score;
    double lo = 0.0;
    double hi = 1.0;
};

ScoredDensity scored_density(const InputDistribution& dist, double tail_mass = 1e-12);

// Law of a*X for X ~ d.
ScoredDensity scaled_density(const ScoredDensity& d, double a);

}  // namespace gammachan
