#include "gammachan/gamma_channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gammachan/errors.hpp"
#include "gammachan/quadrature.hpp"
#include "gammachan/specfun.hpp"
#include "gammachan/stein.hpp"

namespace gammachan {

namespace {

constexpr double kTail = 1e-13;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void validate(const ChannelParams& p) {
    if (!std::isfinite(p.alpha) || p.alpha < 0.5) {
        throw std::domain_error("channel alpha must be >= 1/2 (sqrt decomposition needs a "
                                "nonnegative gamma remainder)");
    }
    if (!std::isfinite(p.lambda) || p.lambda <= 0.0) {
        throw std::domain_error("channel lambda must be > 0");
    }
    if (!std::isfinite(p.r) || p.r < 0.0) {
        throw std::domain_error("channel r must be >= 0");
    }
}

namespace {

ChannelRecord make_record(double x, const ChannelParams& p, CounterRng& rng) {
    ChannelRecord rec;
    rec.x = x;
    // alpha == 1/2 has no gamma remainder at all; the sampler must honour that
    // exactly so V_r is a pure sign there.
    rec.g = p.alpha > 0.5 ? rng.gamma(p.alpha - 0.5, p.lambda) : 0.0;
    rec.n = rng.normal();
    rec.y_r = std::sqrt(p.r * x) + rec.n / std::sqrt(2.0 * p.lambda);
    rec.x_r = rec.g + rec.y_r * rec.y_r;
    if (rec.g == 0.0) {
        rec.v_r = std::copysign(1.0, rec.y_r);
    } else {
        rec.v_r = std::clamp(rec.y_r / std::sqrt(rec.x_r), -1.0, 1.0);
    }
    return rec;
}

}  // namespace

std::vector<ChannelRecord> channel_sample(const InputDistribution& dist,
                                          const ChannelParams& p, std::size_t n,
                                          std::uint64_t seed, std::uint64_t stream) {
    validate(p);
    CounterRng rng(seed, stream);
    std::vector<ChannelRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(make_record(dist.draw(rng), p, rng));
    }
    return out;
}

std::vector<ChannelRecord> channel_sample_at(double x0, const ChannelParams& p,
                                             std::size_t n, std::uint64_t seed,
                                             std::uint64_t stream) {
    validate(p);
    if (!std::isfinite(x0) || x0 < 0.0) {
        throw std::domain_error("channel_sample_at: x0 must be >= 0");
    }
    CounterRng rng(seed, stream);
    std::vector<ChannelRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(make_record(x0, p, rng));
    }
    return out;
}

void write_records_csv(const std::vector<ChannelRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_records_csv: cannot open " + path);
    }
    out << "x,g,n,y_r,x_r,v_r\n";
    char buf[256];
    for (const ChannelRecord& rec : records) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      rec.x, rec.g, rec.n, rec.y_r, rec.x_r, rec.v_r);
        out << buf;
    }
    if (!out) {
        throw std::runtime_error("write_records_csv: write failed for " + path);
    }
}

double conditional_log_density(const ChannelParams& p, double x, double u) {
    if (!(x >= 0.0)) {
        throw std::domain_error("conditional_log_density: x must be >= 0");
    }
    if (!(u > 0.0)) return kNegInf;
    const double rx = p.r * x;
    if (rx <= 0.0) {
        return gamma_log_pdf({p.alpha, p.lambda}, u);
    }
    const double nu = p.alpha - 1.0;
    const double z = 2.0 * p.lambda * std::sqrt(u * rx);
    return std::log(p.lambda) - p.lambda * u - p.lambda * rx +
           0.5 * nu * (std::log(u) - std::log(rx)) + log_bessel_i(nu, z);
}

double conditional_log_density_du(const ChannelParams& p, double x, double u) {
    if (!(x >= 0.0)) {
        throw std::domain_error("conditional_log_density_du: x must be >= 0");
    }
    if (!(u > 0.0)) {
        throw std::domain_error("conditional_log_density_du: u must be > 0");
    }
    const double rx = p.r * x;
    const double nu = p.alpha - 1.0;
    if (rx <= 0.0) {
        return nu / u - p.lambda;
    }
    const double z = 2.0 * p.lambda * std::sqrt(u * rx);
    return -p.lambda + 0.5 * nu / u + (z / (2.0 * u)) * log_bessel_i_derivative(nu, z);
}

double conditional_mean(const ChannelParams& p, double x) {
    return p.alpha / p.lambda + p.r * x;
}

double conditional_variance(const ChannelParams& p, double x) {
    return p.alpha / (p.lambda * p.lambda) + 2.0 * p.r * x / p.lambda;
}

namespace {

// Near u = 0 the conditional behaves like exp(-lambda r x) gamma(alpha, lambda),
// so the cutoff solving mass(lo) = kTail is analytic. Capped at 5% of the mean
// so the window never collapses when lambda r x is large.
double lower_support_cut(const ChannelParams& p, double rx, double mean) {
    const double cap = 0.05 * mean;
    const double ln_lo = (std::log(kTail) + std::log(p.alpha) + log_gamma(p.alpha) +
                          p.lambda * rx - p.alpha * std::log(p.lambda)) /
                         p.alpha;
    return ln_lo < std::log(cap) ? std::exp(ln_lo) : cap;
}

double upper_support_cut(const ChannelParams& p, double mean, double variance) {
    return mean + 12.0 * std::sqrt(variance) + 30.0 / p.lambda;
}

}  // namespace

ScoredDensity conditional_density(const ChannelParams& p, double x) {
    validate(p);
    if (!(x >= 0.0)) {
        throw std::domain_error("conditional_density: x must be >= 0");
    }
    const double m = conditional_mean(p, x);
    ScoredDensity d;
    d.log_pdf = [p, x](double u) { return conditional_log_density(p, x, u); };
    d.score = [p, x](double u) { return conditional_log_density_du(p, x, u); };
    d.lo = lower_support_cut(p, p.r * x, m);
    d.hi = upper_support_cut(p, m, conditional_variance(p, x));
    return d;
}

ChannelMarginal::ChannelMarginal(const InputDistribution& dist, const ChannelParams& p,
                                 double rel_tol)
    : dist_(dist), p_(p), rel_tol_(rel_tol) {
    validate(p);
    if (p.r == 0.0) {
        // zero rate shuts the input out entirely
        closed_ = true;
        closed_params_ = {p.alpha, p.lambda};
    } else if (const auto* g = std::get_if<GammaDist>(&dist.value())) {
        if (std::fabs(g->p.shape - p.alpha) <= 1e-12 * std::max(1.0, p.alpha)) {
            closed_ = true;
            closed_params_ = {p.alpha, 1.0 / (p.r / g->p.rate + 1.0 / p.lambda)};
        }
    } else if (const auto* e = std::get_if<ExponentialDist>(&dist.value())) {
        if (std::fabs(p.alpha - 1.0) <= 1e-12) {
            closed_ = true;
            closed_params_ = {1.0, 1.0 / (p.r / e->rate + 1.0 / p.lambda)};
        }
    }
    const auto xs = dist_.support(kTail);
    xlo_ = xs.first;
    xhi_ = xs.second;
    if (closed_) {
        const auto s = InputDistribution::gamma(closed_params_.shape, closed_params_.rate)
                           .support(kTail);
        lo_ = s.first;
        hi_ = s.second;
    } else {
        lo_ = lower_support_cut(p_, 0.0, p_.alpha / p_.lambda);
        hi_ = upper_support_cut(p_, conditional_mean(p_, xhi_),
                                conditional_variance(p_, xhi_));
    }
}

double ChannelMarginal::quadrature_log_density(double u, double* dlog) const {
    if (dlog) *dlog = 0.0;
    if (!(u > 0.0)) return kNegInf;
    double xa = xlo_;
    double xb = xhi_;
    if (p_.r > 0.0) {
        // beyond sqrt(r x) > sqrt(u) + 14 noise sigmas the kernel is dead
        const double root = std::sqrt(u) + 14.0 / std::sqrt(2.0 * p_.lambda);
        xb = std::min(xb, root * root / p_.r);
    }
    if (!(xb > xa)) xb = xa * (1.0 + 1e-9) + 1e-300;

    const auto lf = [&](double x) {
        const double lp = dist_.log_pdf(x);
        return lp == kNegInf ? kNegInf : lp + conditional_log_density(p_, x, u);
    };

    // scale by the probed max so the adaptive pass works near exp(0)
    double peak = kNegInf;
    for (int i = 0; i <= 24; ++i) {
        const double t = static_cast<double>(i) / 24.0;
        peak = std::max(peak, lf(xa + (xb - xa) * t * t));
    }
    if (p_.r > 0.0) {
        const double xstar = std::clamp(u / p_.r, xa, xb);
        for (double f : {0.9, 0.97, 1.0, 1.03, 1.1}) {
            peak = std::max(peak, lf(std::clamp(xstar * f, xa, xb)));
        }
    }
    if (peak == kNegInf) return kNegInf;

    const auto scaled = [&](double x) {
        const double v = lf(x) - peak;
        return v > -700.0 ? std::exp(v) : 0.0;
    };
    QuadratureGrid grid = QuadratureGrid::log_spaced(xa, xb, kTail, rel_tol_);
    const IntegrationResult w0 = integrate(scaled, grid);
    if (!(w0.value > 0.0)) return kNegInf;
    if (w0.abs_error > 1e-6 * w0.value) {
        throw AccuracyError("channel marginal quadrature failed at u=" + format_g(u) +
                            " (rel err " + format_g(w0.abs_error / w0.value) + ")");
    }
    if (dlog) {
        const auto weighted = [&](double x) {
            const double v = lf(x) - peak;
            if (v <= -700.0) return 0.0;
            return std::exp(v) * conditional_log_density_du(p_, x, u);
        };
        const IntegrationResult w1 = integrate(weighted, grid);
        *dlog = w1.value / w0.value;
    }
    return peak + std::log(w0.value);
}

double ChannelMarginal::log_density(double u) const {
    if (closed_) {
        return u > 0.0 ? gamma_log_pdf(closed_params_, u) : kNegInf;
    }
    return quadrature_log_density(u, nullptr);
}

double ChannelMarginal::dlog_density(double u) const {
    if (!(u > 0.0)) {
        throw std::domain_error("ChannelMarginal::dlog_density: u must be > 0");
    }
    if (closed_) {
        return (closed_params_.shape - 1.0) / u - closed_params_.rate;
    }
    double d = 0.0;
    (void)quadrature_log_density(u, &d);
    return d;
}

double ChannelMarginal::log_density_fast(double u) const {
    if (has_grid_ && u > 0.0) {
        const double w = std::log(u);
        if (grid_.covers(w)) return grid_(w);
    }
    return log_density(u);
}

void ChannelMarginal::build_grid(std::size_t nodes) {
    if (closed_) return;  // the closed form is already the fast path
    nodes = std::clamp<std::size_t>(nodes, 256, 8192);
    const double wlo = std::log(lo_);
    const double whi = std::log(hi_);
    UniformCubic grid;
    grid.a = wlo;
    grid.step = (whi - wlo) / static_cast<double>(nodes - 1);
    grid.v.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        grid.v[i] = quadrature_log_density(std::exp(wlo + grid.step * static_cast<double>(i)),
                                           nullptr);
    }
    grid_ = std::move(grid);
    has_grid_ = true;
}

ScoredDensity ChannelMarginal::as_scored_density() const {
    ScoredDensity d;
    d.lo = lo_;
    d.hi = hi_;
    if (closed_) {
        const GammaParams q = closed_params_;
        d.log_pdf = [q](double u) { return u > 0.0 ? gamma_log_pdf(q, u) : kNegInf; };
        d.score = [q](double u) { return (q.shape - 1.0) / u - q.rate; };
        return d;
    }
    // self-contained copy so the density can outlive this object
    auto self = std::make_shared<ChannelMarginal>(*this);
    d.log_pdf = [self](double u) { return self->log_density(u); };
    d.score = [self](double u) { return self->dlog_density(u); };
    return d;
}

std::string ChannelMarginal::cache_key() const {
    std::ostringstream key;
    key << dist_.id() << "|alpha=" << format_g(p_.alpha) << "|lambda=" << format_g(p_.lambda)
        << "|r=" << format_g(p_.r) << "|rel_tol=" << format_g(rel_tol_);
    return key.str();
}

bool ChannelMarginal::load_cache(const std::string& path) {
    std::ifstream in(path);
    if (!in) return false;
    std::string magic, key;
    if (!std::getline(in, magic) || magic != "gammachan-marginal-cache-v1") return false;
    if (!std::getline(in, key) || key != cache_key()) return false;
    double a = 0.0, step = 0.0;
    std::size_t count = 0;
    if (!(in >> a >> step >> count) || count < 4 || count > (1u << 20)) return false;
    UniformCubic grid;
    grid.a = a;
    grid.step = step;
    grid.v.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (!(in >> grid.v[i])) return false;
    }
    grid_ = std::move(grid);
    has_grid_ = true;
    return true;
}

void ChannelMarginal::save_cache(const std::string& path) const {
    if (!has_grid_) {
        throw std::logic_error("ChannelMarginal::save_cache: no grid built");
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("ChannelMarginal::save_cache: cannot open " + path);
    }
    out << "gammachan-marginal-cache-v1\n" << cache_key() << "\n";
    out << format_g(grid_.a) << " " << format_g(grid_.step) << " " << grid_.v.size() << "\n";
    for (double v : grid_.v) out << format_g(v) << "\n";
}

double channel_mgf_window(const InputDistribution& dist, const ChannelParams& p) {
    validate(p);
    const double a = dist.mgf_window();
    if (a <= 0.0) return 0.0;
    if (p.r == 0.0) return p.lambda;
    return p.lambda / (p.lambda * p.r / a + 1.0);
}

double channel_mgf(const InputDistribution& dist, const ChannelParams& p, double t) {
    validate(p);
    const double w = channel_mgf_window(dist, p);
    if (t == 0.0) return 1.0;
    if (!(t > 0.0) || t >= w) {
        throw std::domain_error("channel_mgf: t=" + format_g(t) + " outside [0, " +
                                format_g(w) + "), the widest window this input admits");
    }
    const double shrink = 1.0 - t / p.lambda;
    return std::pow(shrink, -p.alpha) * dist.mgf(p.r * t / shrink);
}

std::size_t default_bins(std::size_t n) {
    const auto b = static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(n))));
    return std::clamp<std::size_t>(b, 30, 400);
}

double BinnedRegression::operator()(double x_r) const {
    if (mean.empty()) {
        throw std::logic_error("BinnedRegression: empty");
    }
    const auto it = std::upper_bound(edges.begin(), edges.end(), x_r);
    auto i = static_cast<std::ptrdiff_t>(it - edges.begin()) - 1;
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(mean.size()) - 1);
    return mean[static_cast<std::size_t>(i)];
}

BinnedRegression binned_conditional_expectation(
    const std::vector<ChannelRecord>& records,
    const std::function<double(const ChannelRecord&)>& g, std::size_t bins) {
    const std::size_t n = records.size();
    if (bins == 0) bins = default_bins(n);
    if (bins < 10) {
        throw std::invalid_argument("binned_conditional_expectation: need at least 10 bins");
    }
    if (n < 50 * bins) {
        throw AccuracyError("binned_conditional_expectation: fewer than 50 samples per bin (n=" +
                            std::to_string(n) + ", bins=" + std::to_string(bins) + ")");
    }
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(), [&records](std::uint32_t a, std::uint32_t b) {
        return records[a].x_r < records[b].x_r;
    });

    BinnedRegression reg;
    reg.edges.reserve(bins + 1);
    reg.mean.reserve(bins);
    reg.se.reserve(bins);
    reg.mass.reserve(bins);
    reg.count.reserve(bins);
    reg.edges.push_back(records[idx.front()].x_r);
    for (std::size_t b = 0; b < bins; ++b) {
        const std::size_t lo = b * n / bins;
        const std::size_t hi = (b + 1) * n / bins;
        const auto cnt = static_cast<double>(hi - lo);
        double sum = 0.0;
        for (std::size_t i = lo; i < hi; ++i) sum += g(records[idx[i]]);
        const double mean = sum / cnt;
        double ss = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double d = g(records[idx[i]]) - mean;
            ss += d * d;
        }
        reg.mean.push_back(mean);
        reg.se.push_back(std::sqrt(ss / (cnt * (cnt - 1.0))));
        reg.mass.push_back(cnt / static_cast<double>(n));
        reg.count.push_back(hi - lo);
        reg.edges.push_back(b + 1 < bins
                                ? 0.5 * (records[idx[hi - 1]].x_r + records[idx[hi]].x_r)
                                : records[idx.back()].x_r);
    }
    return reg;
}

namespace {
constexpr std::uint64_t kBootStream = 0x62747374u;  // distinct from sampling streams
}  // namespace

double binned_square_sum(const BinnedRegression& reg) {
    double j = 0.0;
    for (std::size_t b = 0; b < reg.bins(); ++b) {
        j += reg.mass[b] * reg.mean[b] * reg.mean[b];
    }
    return j;
}

double binned_square_sum_se(const BinnedRegression& reg, std::uint64_t seed) {
    CounterRng rng(seed, kBootStream);
    constexpr int kReps = 200;
    double sum = 0.0, sum2 = 0.0;
    for (int rep = 0; rep < kReps; ++rep) {
        double j = 0.0;
        for (std::size_t b = 0; b < reg.bins(); ++b) {
            const double m = reg.mean[b] + reg.se[b] * rng.normal();
            j += reg.mass[b] * m * m;
        }
        sum += j;
        sum2 += j * j;
    }
    const double mean = sum / kReps;
    return std::sqrt(std::max(0.0, sum2 / kReps - mean * mean));
}

MonteCarloEstimate channel_jst_mc(const InputDistribution& dist, const ChannelParams& p,
                                  std::size_t n, std::uint64_t seed, std::size_t bins) {
    const auto records = channel_sample(dist, p, n, seed, 0);
    const auto reg = binned_conditional_expectation(
        records,
        [&p](const ChannelRecord& rec) { return std::sqrt(p.r * rec.x) * rec.v_r; }, bins);
    const double j = p.lambda * binned_square_sum(reg);
    const double se = p.lambda * binned_square_sum_se(reg, seed);
    return {j, se, n, seed};
}

double channel_jst_rescaled(const InputDistribution& dist, const ChannelParams& p) {
    ChannelMarginal marg(dist, p);
    if (marg.closed_form()) {
        // X_r/(1+r) is gamma(alpha, (1+r) rate); the functional is closed form
        const double mu = (1.0 + p.r) * marg.closed_params().rate;
        const double d = p.lambda - mu;
        return d * d * p.alpha / (mu * p.lambda);
    }
    const ScoredDensity scaled = scaled_density(marg.as_scored_density(), 1.0 / (1.0 + p.r));
    return standardized_gamma_fisher(scaled, p.alpha, p.lambda);
}

double channel_jst_quadrature(const InputDistribution& dist, const ChannelParams& p) {
    validate(p);
    const double jt = channel_jst_rescaled(dist, p);
    const double ex = dist.mean();
    if (!std::isfinite(ex)) {
        throw std::domain_error("channel_jst_quadrature: input needs a finite mean");
    }
    // exact change of rate from lambda/(1+r) back to lambda, using
    // E[X rho(X)] = -1 and the known output mean
    const double mr = p.alpha / p.lambda + p.r * ex;
    const double s = 1.0 + p.r;
    return jt / s + (2.0 * p.r / s) * (p.lambda * mr / s - p.alpha) +
           (p.lambda * p.r * p.r / (s * s)) * mr;
}

MonteCarloEstimate channel_score_representation_gap(const InputDistribution& dist,
                                                    const ChannelParams& p, std::size_t n,
                                                    std::uint64_t seed, std::size_t bins) {
    const auto records = channel_sample(dist, p, n, seed, 0);
    const auto reg = binned_conditional_expectation(
        records,
        [&p](const ChannelRecord& rec) { return std::sqrt(p.r * rec.x) * rec.v_r; }, bins);
    const auto reg_u = binned_conditional_expectation(
        records, [](const ChannelRecord& rec) { return rec.x_r; }, bins == 0 ? 0 : bins);

    const ChannelMarginal marg(dist, p);
    // per-bin gap between the score identity LHS and lambda * regression mean,
    // with the regression sampling noise subtracted in expectation
    std::vector<double> gap(reg.bins());
    double total = 0.0;
    for (std::size_t b = 0; b < reg.bins(); ++b) {
        const double u = reg_u.mean[b];
        const double rho = marg.dlog_density(u);
        const double sqrt_u = std::sqrt(u);
        const double lhs = (u * rho + 0.5) / sqrt_u + p.lambda * sqrt_u -
                           (p.alpha - 0.5) / sqrt_u;
        gap[b] = lhs - p.lambda * reg.mean[b];
        const double noise = p.lambda * reg.se[b];
        total += reg.mass[b] * (gap[b] * gap[b] - noise * noise);
    }

    CounterRng rng(seed, kBootStream + 1);
    constexpr int kReps = 200;
    double sum = 0.0, sum2 = 0.0;
    for (int rep = 0; rep < kReps; ++rep) {
        double t = 0.0;
        for (std::size_t b = 0; b < reg.bins(); ++b) {
            const double noise = p.lambda * reg.se[b];
            const double d = gap[b] + noise * rng.normal();
            t += reg.mass[b] * (d * d - noise * noise);
        }
        sum += t;
        sum2 += t * t;
    }
    const double mean = sum / kReps;
    const double se = std::sqrt(std::max(0.0, sum2 / kReps - mean * mean));
    return {total, se, n, seed};
}

double mutual_information_quadrature(const InputDistribution& dist, const ChannelParams& p) {
    validate(p);
    if (p.r == 0.0) return 0.0;
    ChannelMarginal marg(dist, p, 1e-9);
    if (!marg.closed_form()) marg.build_grid(3072);
    const auto log_marginal = [&marg](double u) { return marg.log_density_fast(u); };

    const auto inner = [&](double x) {
        const ScoredDensity cond = conditional_density(p, x);
        const QuadratureGrid grid = QuadratureGrid::log_spaced(cond.lo, cond.hi, kTail, 1e-8);
        const auto f = [&](double u) {
            const double lc = conditional_log_density(p, x, u);
            if (lc < -700.0) return 0.0;
            return std::exp(lc) * (lc - log_marginal(u));
        };
        return integrate(f, grid).value;
    };

    const auto xs = dist.support(1e-11);
    const QuadratureGrid outer = QuadratureGrid::log_spaced(xs.first, xs.second, 1e-11, 1e-7);
    const auto f = [&](double x) {
        const double lp = dist.log_pdf(x);
        return lp == kNegInf ? 0.0 : std::exp(lp) * inner(x);
    };
    const IntegrationResult res = integrate(f, outer);
    if (!res.converged) {
        throw AccuracyError("mutual_information_quadrature: outer integral did not converge");
    }
    return res.value;
}

MonteCarloEstimate mutual_information_mc(const InputDistribution& dist,
                                         const ChannelParams& p, std::size_t n,
                                         std::uint64_t seed) {
    validate(p);
    const ChannelMarginal marg(dist, p);
    if (!marg.closed_form()) {
        throw std::invalid_argument(
            "mutual_information_mc needs a gamma input with shape matching alpha "
            "(closed-form marginal); use the quadrature route otherwise");
    }
    if (p.r == 0.0) return {0.0, 0.0, n, seed};
    const GammaParams q = marg.closed_params();
    const auto records = channel_sample(dist, p, n, seed, 0);
    double sum = 0.0, sum2 = 0.0;
    for (const ChannelRecord& rec : records) {
        const double v = conditional_log_density(p, rec.x, rec.x_r) - gamma_log_pdf(q, rec.x_r);
        sum += v;
        sum2 += v * v;
    }
    const auto dn = static_cast<double>(n);
    const double mean = sum / dn;
    const double var = std::max(0.0, (sum2 - dn * mean * mean) / (dn - 1.0));
    return {mean, std::sqrt(var / dn), n, seed};
}

}  // namespace gammachan
