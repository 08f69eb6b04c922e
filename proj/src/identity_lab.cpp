#include "gammachan/identity_lab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <thread>
#include <variant>

#include "gammachan/errors.hpp"
#include "gammachan/quadrature.hpp"
#include "gammachan/specfun.hpp"
#include "gammachan/stein.hpp"

namespace gammachan {

namespace {

constexpr double kTail = 1e-13;

void require_moments(const InputDistribution& dist, double k) {
    if (!std::isfinite(dist.moment(k))) {
        throw std::domain_error("input must have finite alpha+4 moments; moment of order " +
                                std::to_string(k) + " diverges for " + dist.id());
    }
}

void require_matched_mean(const InputDistribution& dist, double alpha, double lambda,
                          const char* where) {
    const double m = dist.mean();
    if (!std::isfinite(m) || std::fabs(m * lambda / alpha - 1.0) > 1e-6) {
        throw std::domain_error(std::string(where) +
                                ": requires E[X] = alpha/lambda; input " + dist.id() +
                                " has mean " + std::to_string(m) +
                                " (rescale the input or use the scaled variant)");
    }
}

// Composite Gauss-Legendre over log-spaced panels; tames the x^{alpha-1}
// endpoint while keeping evaluation counts fixed and small.
double panelized_expectation(const InputDistribution& dist, double tail,
                             const std::function<double(double)>& h, int nodes_per_panel) {
    const auto xs = dist.support(tail);
    const QuadratureGrid grid = QuadratureGrid::log_spaced(xs.first, xs.second, tail, 1e-9);
    const GaussLegendre gl = gauss_legendre(nodes_per_panel);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < grid.breakpoints.size(); ++i) {
        const double a = grid.breakpoints[i];
        const double b = grid.breakpoints[i + 1];
        const double c = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int k = 0; k < nodes_per_panel; ++k) {
            const double x = c + half * gl.x[k];
            const double lp = dist.log_pdf(x);
            if (lp < -700.0) continue;
            total += half * gl.w[k] * std::exp(lp) * h(x);
        }
    }
    return total;
}

bool gamma_shape_matched(const InputDistribution& dist, double alpha, double* rate) {
    if (const auto* g = std::get_if<GammaDist>(&dist.value())) {
        if (std::fabs(g->p.shape - alpha) <= 1e-12 * std::max(1.0, alpha)) {
            if (rate) *rate = g->p.rate;
            return true;
        }
    } else if (const auto* e = std::get_if<ExponentialDist>(&dist.value())) {
        if (std::fabs(alpha - 1.0) <= 1e-12) {
            if (rate) *rate = e->rate;
            return true;
        }
    }
    return false;
}

std::uint64_t row_seed(const LabSettings& s, std::size_t index) {
    return s.seed + 1000 * (index + 1);
}

}  // namespace

double fd_step(double r) {
    double h = std::max(1e-3, 1e-2 * r);
    if (h > 0.5 * r) h = 0.5 * r;
    return h;
}

double fd_derivative(const std::function<double(double)>& f, double r, bool richardson) {
    if (!(r > 0.0)) {
        throw std::domain_error("fd_derivative: r must be > 0");
    }
    const double h = fd_step(r);
    const auto central = [&](double step) { return (f(r + step) - f(r - step)) / (2.0 * step); };
    if (!richardson) return central(h);
    return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

InputDistribution scale_input(const InputDistribution& dist, double s) {
    if (!std::isfinite(s) || !(s > 0.0)) {
        throw std::invalid_argument("scale_input: scale must be positive and finite");
    }
    const auto& v = dist.value();
    if (const auto* g = std::get_if<GammaDist>(&v)) {
        return InputDistribution::gamma(g->p.shape, g->p.rate / s);
    }
    if (const auto* e = std::get_if<ExponentialDist>(&v)) {
        return InputDistribution::exponential(e->rate / s);
    }
    if (const auto* m = std::get_if<GammaMixtureDist>(&v)) {
        auto comps = m->components;
        for (auto& c : comps) c.rate /= s;
        return InputDistribution::gamma_mixture(m->weights, std::move(comps));
    }
    const auto& l = std::get<LogNormalDist>(v);
    return InputDistribution::log_normal(l.mu + std::log(s), l.sigma);
}

double relative_entropy_vs_rescaled_gamma(const InputDistribution& dist,
                                          const ChannelParams& p) {
    validate(p);
    require_moments(dist, p.alpha + 4.0);
    const GammaParams target{p.alpha, p.lambda / (1.0 + p.r)};
    const ChannelMarginal marg(dist, p);
    if (marg.closed_form()) {
        return gamma_relative_entropy(marg.closed_params(), target);
    }
    const ScoredDensity d = marg.as_scored_density();
    const QuadratureGrid grid = QuadratureGrid::log_spaced(d.lo, d.hi, kTail, 1e-9);
    const auto f = [&](double u) {
        const double lp = d.log_pdf(u);
        if (lp < -700.0) return 0.0;
        return std::exp(lp) * (lp - gamma_log_pdf(target, u));
    };
    return integrate_checked(f, grid, 1e-9);
}

double input_relative_entropy(const InputDistribution& dist, double alpha, double lambda) {
    const GammaParams target{alpha, lambda};
    const auto& v = dist.value();
    if (const auto* g = std::get_if<GammaDist>(&v)) {
        return gamma_relative_entropy(g->p, target);
    }
    if (const auto* e = std::get_if<ExponentialDist>(&v)) {
        return gamma_relative_entropy({1.0, e->rate}, target);
    }
    const ScoredDensity d = scored_density(dist, kTail);
    const QuadratureGrid grid = QuadratureGrid::log_spaced(d.lo, d.hi, kTail, 1e-9);
    const auto f = [&](double u) {
        const double lp = d.log_pdf(u);
        if (lp < -700.0) return 0.0;
        return std::exp(lp) * (lp - gamma_log_pdf(target, u));
    };
    return integrate_checked(f, grid, 1e-9);
}

double mean_conditional_rescaled_fisher(const InputDistribution& dist,
                                        const ChannelParams& p) {
    validate(p);
    const auto h = [&](double x) {
        const ScoredDensity cond = conditional_density(p, x);
        const ScoredDensity scaled = scaled_density(cond, 1.0 / (1.0 + p.r));
        return standardized_gamma_fisher(scaled, p.alpha, p.lambda, 1e-8);
    };
    return panelized_expectation(dist, 1e-10, h, 16);
}

MiReDecomposition mi_re_decomposition(const InputDistribution& dist, const ChannelParams& p) {
    validate(p);
    MiReDecomposition out;
    out.direct_mi = mutual_information_quadrature(dist, p);
    out.marginal_term = relative_entropy_vs_rescaled_gamma(dist, p);
    const GammaParams target{p.alpha, p.lambda / (1.0 + p.r)};
    const auto h = [&](double x) {
        const ScoredDensity cond = conditional_density(p, x);
        const QuadratureGrid grid = QuadratureGrid::log_spaced(cond.lo, cond.hi, kTail, 1e-8);
        const auto f = [&](double u) {
            const double lc = conditional_log_density(p, x, u);
            if (lc < -700.0) return 0.0;
            return std::exp(lc) * (lc - gamma_log_pdf(target, u));
        };
        return integrate(f, grid).value;
    };
    out.mean_conditional_term = panelized_expectation(dist, 1e-10, h, 16);
    return out;
}

double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf) {
    if (values.empty()) {
        throw std::invalid_argument("ks_statistic: empty sample");
    }
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double fi = cdf(values[i]);
        d = std::max(d, std::max(fi - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - fi));
    }
    return d;
}

double ks_critical_value(double level, std::size_t n) {
    struct Entry {
        double level;
        double c;
    };
    static constexpr Entry kTable[] = {
        {0.10, 1.22385}, {0.05, 1.35810}, {0.01, 1.62762}, {0.001, 1.94947}};
    const double sn = std::sqrt(static_cast<double>(n));
    for (const Entry& e : kTable) {
        if (std::fabs(level - e.level) < 1e-12) {
            return e.c / (sn + 0.12 + 0.11 / sn);
        }
    }
    throw std::invalid_argument("ks_critical_value: level must be one of 0.1/0.05/0.01/0.001");
}

std::vector<IdentityCheckRow> relative_entropy_flow_rows(const InputDistribution& dist,
                                                         const ChannelParams& base,
                                                         const std::vector<double>& r_grid,
                                                         const LabSettings&) {
    std::vector<IdentityCheckRow> rows;
    for (double r : r_grid) {
        const ChannelParams pr{base.alpha, base.lambda, r};
        validate(pr);
        require_moments(dist, pr.alpha + 4.0);
        const GammaParams target{pr.alpha, pr.lambda / (1.0 + r)};
        const ChannelMarginal marg(dist, pr);
        if (marg.closed_form()) {
            // integral route vs the closed-form divergence: checks the
            // integration machinery against plain algebra
            const ScoredDensity d = marg.as_scored_density();
            const QuadratureGrid grid = QuadratureGrid::log_spaced(d.lo, d.hi, kTail, 1e-10);
            const auto f = [&](double u) {
                const double lp = d.log_pdf(u);
                if (lp < -700.0) return 0.0;
                return std::exp(lp) * (lp - gamma_log_pdf(target, u));
            };
            const double lhs = integrate(f, grid).value;
            const double rhs = gamma_relative_entropy(marg.closed_params(), target);
            rows.push_back(equality_row(IdentityId::relent_flow, dist.id(), pr.alpha,
                                        pr.lambda, r, lhs, rhs, 0.0, 0.0, 1e-8));
        } else {
            const double d = relative_entropy_vs_rescaled_gamma(dist, pr);
            rows.push_back(exploratory_row(IdentityId::relent_flow, dist.id(), pr.alpha,
                                           pr.lambda, r, d, 0.0, 0.0, 0.0));
        }
    }
    return rows;
}

std::vector<IdentityCheckRow> debruijn_rows(const InputDistribution& dist,
                                            const ChannelParams& base,
                                            const std::vector<double>& r_grid,
                                            const LabSettings& s) {
    require_matched_mean(dist, base.alpha, base.lambda, "debruijn_rows");
    require_moments(dist, base.alpha + 4.0);
    const auto drel = [&](double rr) {
        return relative_entropy_vs_rescaled_gamma(dist, {base.alpha, base.lambda, rr});
    };
    std::vector<IdentityCheckRow> rows;
    std::size_t index = 0;
    for (double r : r_grid) {
        ++index;
        if (!(r > 0.0)) continue;  // the 1/r side is defined by its limit only
        const ChannelParams pr{base.alpha, base.lambda, r};
        const double lhs = fd_derivative(drel, r, s.richardson);

        const double jq = channel_jst_quadrature(dist, pr);
        const double rhs_q = jq / r - base.alpha * r / (1.0 + r);
        rows.push_back(equality_row(IdentityId::debruijn_gamma, dist.id(), pr.alpha,
                                    pr.lambda, r, lhs, rhs_q, 0.0, 0.0,
                                    std::max(1e-5, 0.01 * std::fabs(rhs_q))));

        const MonteCarloEstimate jm =
            channel_jst_mc(dist, pr, s.mc_samples, row_seed(s, index), s.bins);
        const double rhs_m = jm.value / r - base.alpha * r / (1.0 + r);
        rows.push_back(equality_row(IdentityId::debruijn_gamma, dist.id(), pr.alpha,
                                    pr.lambda, r, lhs, rhs_m, 0.0, jm.std_error / r, 1e-4));

        rows.push_back(equality_row(IdentityId::fisher_routes, dist.id(), pr.alpha,
                                    pr.lambda, r, jm.value, jq, jm.std_error, 0.0,
                                    std::max(1e-4, 0.02 * std::fabs(jq))));
    }
    return rows;
}

IdentityCheckRow debruijn_integrated_row(const InputDistribution& dist,
                                         const ChannelParams& base, const LabSettings&) {
    ChannelParams probe{base.alpha, base.lambda, 1.0};
    validate(probe);
    require_moments(dist, base.alpha + 4.0);
    const auto integrand = [&](double rr) {
        if (!(rr > 0.0)) return 0.0;
        return channel_jst_rescaled(dist, {base.alpha, base.lambda, rr}) / (rr * (1.0 + rr));
    };
    // fixed composite rule: the integrand is smooth, vanishes linearly at 0,
    // and decays like K/r^2; the tail past each cutoff follows that model
    static constexpr double kSeg[] = {0.0, 0.05, 0.2, 1.0, 4.0, 12.0, 50.0, 100.0};
    const GaussLegendre gl = gauss_legendre(8);
    double upto50 = 0.0, total = 0.0;
    for (std::size_t i = 0; i + 1 < std::size(kSeg); ++i) {
        const double a = kSeg[i], b = kSeg[i + 1];
        const double c = 0.5 * (a + b), half = 0.5 * (b - a);
        double seg = 0.0;
        for (std::size_t k = 0; k < gl.x.size(); ++k) {
            seg += half * gl.w[k] * integrand(c + half * gl.x[k]);
        }
        total += seg;
        if (b <= 50.0) upto50 += seg;
    }
    const auto tail_from = [&](double R) { return integrand(R) * R * (1.0 + R) * std::log1p(1.0 / R); };
    const double est100 = total + tail_from(100.0);
    const double est50 = upto50 + tail_from(50.0);
    const double rhs = input_relative_entropy(dist, base.alpha, base.lambda);
    return equality_row(IdentityId::debruijn_integrated, dist.id(), base.alpha, base.lambda,
                        100.0, est100, rhs, std::fabs(est100 - est50), 0.0,
                        std::max(1e-6, 0.02 * std::fabs(rhs)));
}

std::vector<IdentityCheckRow> gsv_rows(const InputDistribution& dist,
                                       const ChannelParams& base,
                                       const std::vector<double>& r_grid,
                                       const LabSettings& s) {
    InputDistribution input = dist;
    const double m = dist.mean();
    if (!std::isfinite(m) || !(m > 0.0)) {
        throw std::domain_error("gsv_rows: input needs a positive finite mean");
    }
    const double target_mean = base.alpha / base.lambda;
    if (std::fabs(m * base.lambda / base.alpha - 1.0) > 1e-9) {
        input = scale_input(dist, target_mean / m);
        std::fprintf(stderr, "note: gsv input %s rescaled to %s so E[X] = alpha/lambda\n",
                     dist.id().c_str(), input.id().c_str());
    }
    require_moments(input, base.alpha + 4.0);

    const bool matched = gamma_shape_matched(input, base.alpha, nullptr) &&
                         std::fabs(input.mean() * base.lambda / base.alpha - 1.0) < 1e-12;
    const auto mi = [&](double rr) {
        return mutual_information_quadrature(input, {base.alpha, base.lambda, rr});
    };
    const GaussLegendre gl = gauss_legendre(64);
    const auto xs = input.support(1e-9);

    std::vector<IdentityCheckRow> rows;
    std::size_t index = 0;
    for (double r : r_grid) {
        ++index;
        if (!(r > 0.0)) continue;
        const ChannelParams pr{base.alpha, base.lambda, r};
        const std::uint64_t seed = row_seed(s, index);
        const double lhs = fd_derivative(mi, r, s.richardson);

        // joint term: E[ E[sqrt(X) V_r | X_r]^2 ] by binned regression
        const auto records = channel_sample(input, pr, s.mc_samples, seed, 0);
        const auto reg = binned_conditional_expectation(
            records, [](const ChannelRecord& rec) { return std::sqrt(rec.x) * rec.v_r; },
            s.bins);
        const double joint = binned_square_sum(reg);
        const double joint_se = binned_square_sum_se(reg, seed);

        // per-x term: E_X[ x E[E[V_r(x)|X_r(x)]^2] ] on a 64-node grid with
        // point-mass channels; per-node sample size keeps bins occupied
        const std::size_t node_n = std::max<std::size_t>(s.mc_samples / 64, 1600);
        double mean_xt = 0.0, var_xt = 0.0;
        for (int k = 0; k < 64; ++k) {
            const double x = 0.5 * (xs.first + xs.second) +
                             0.5 * (xs.second - xs.first) * gl.x[k];
            const double w = 0.5 * (xs.second - xs.first) * gl.w[k];
            const double px = std::exp(input.log_pdf(x));
            if (!(px > 0.0) || !(x > 0.0)) continue;
            const auto recs = channel_sample_at(x, pr, node_n, seed,
                                                1000 + static_cast<std::uint64_t>(k));
            const auto regk = binned_conditional_expectation(
                recs, [](const ChannelRecord& rec) { return rec.v_r; }, 0);
            const double tk = binned_square_sum(regk);
            const double tk_se =
                binned_square_sum_se(regk, seed + static_cast<std::uint64_t>(k) + 1);
            const double weight = w * px * x;
            mean_xt += weight * tk;
            var_xt += weight * weight * tk_se * tk_se;
        }

        const double rhs = base.lambda * (mean_xt - joint);
        const double rhs_se = base.lambda * std::hypot(std::sqrt(var_xt), joint_se);
        const double tol =
            std::max(1e-5, 0.05 * std::max(std::fabs(lhs), std::fabs(rhs)));
        rows.push_back(equality_row(IdentityId::gsv_gamma, input.id(), pr.alpha, pr.lambda,
                                    r, lhs, rhs, 0.0, rhs_se, tol));
        if (matched) {
            // the slope bound saturates the matched-gamma case
            rows.push_back(bound_row(IdentityId::gsv_gamma, input.id(), pr.alpha, pr.lambda,
                                     r, lhs, base.alpha / (1.0 + r), 0.0, 0.0, 1e-4));
        }
    }
    return rows;
}

std::vector<IdentityCheckRow> bounds_rows(const InputDistribution& dist,
                                          const ChannelParams& base,
                                          const std::vector<double>& r_grid,
                                          const LabSettings& s) {
    const double ex = dist.mean();
    if (!std::isfinite(ex)) {
        throw std::domain_error("bounds_rows: input needs a finite mean");
    }
    double rate = 0.0;
    const bool shape_matched = gamma_shape_matched(dist, base.alpha, &rate);
    const bool rate_matched = shape_matched && std::fabs(rate - base.lambda) <= 1e-12;

    std::map<double, double> mi_cache;
    const auto mi = [&](double rr) {
        const auto it = mi_cache.find(rr);
        if (it != mi_cache.end()) return it->second;
        const double v = mutual_information_quadrature(dist, {base.alpha, base.lambda, rr});
        mi_cache.emplace(rr, v);
        return v;
    };

    std::vector<IdentityCheckRow> rows;
    std::size_t index = 0;
    for (double r : r_grid) {
        ++index;
        const ChannelParams pr{base.alpha, base.lambda, r};
        const std::uint64_t seed = row_seed(s, index);
        const double cap = base.lambda * r * ex;

        const MonteCarloEstimate jm = channel_jst_mc(dist, pr, s.mc_samples, seed, s.bins);
        rows.push_back(bound_row(IdentityId::bound_eq28, dist.id(), pr.alpha, pr.lambda, r,
                                 jm.value, cap, jm.std_error, 0.0, 0.0));
        const double jq = channel_jst_quadrature(dist, pr);
        rows.push_back(bound_row(IdentityId::bound_eq28, dist.id(), pr.alpha, pr.lambda, r,
                                 jq, cap, 0.0, 0.0, 1e-6));

        if (r > 0.0) {
            const double slope = fd_derivative(mi, r, s.richardson);
            const auto records = channel_sample(dist, pr, s.mc_samples, seed, 1);
            const auto reg = binned_conditional_expectation(
                records, [](const ChannelRecord& rec) { return std::sqrt(rec.x) * rec.v_r; },
                s.bins);
            const double joint = binned_square_sum(reg);
            const double joint_se = binned_square_sum_se(reg, seed + 1);
            rows.push_back(bound_row(IdentityId::bound1, dist.id(), pr.alpha, pr.lambda, r,
                                     slope, base.lambda * (ex - joint), 0.0,
                                     base.lambda * joint_se, 0.0));
        }

        if (rate_matched) {
            rows.push_back(bound_row(IdentityId::bound2, dist.id(), pr.alpha, pr.lambda, r,
                                     mi(r), base.alpha * std::log1p(r), 0.0, 0.0, 1e-6));
        }
        if (shape_matched) {
            rows.push_back(bound_row(IdentityId::bound_alpha_nu, dist.id(), pr.alpha,
                                     pr.lambda, r, mi(r),
                                     base.alpha * std::log1p(base.lambda * r / rate), 0.0,
                                     0.0, 1e-6));
        }
    }
    return rows;
}

std::vector<IdentityCheckRow> alpha_half_rows(double lambda,
                                              const std::vector<double>& r_grid,
                                              const LabSettings& s) {
    const InputDistribution input = InputDistribution::gamma(0.5, lambda);
    std::vector<IdentityCheckRow> rows;
    std::size_t index = 0;
    for (double r : r_grid) {
        ++index;
        const ChannelParams pr{0.5, lambda, r};
        const MonteCarloEstimate est =
            mutual_information_mc(input, pr, s.mc_samples, row_seed(s, index));
        const double half = 0.5 * std::log1p(r);
        rows.push_back(bound_row(IdentityId::lower_half, input.id(), 0.5, lambda, r,
                                 half - std::log(2.0), est.value, 0.0, est.std_error, 0.0));
        rows.push_back(bound_row(IdentityId::bound2, input.id(), 0.5, lambda, r, est.value,
                                 half, est.std_error, 0.0, 0.0));
        if (half > 0.0) {
            const double ratio = est.value / half;
            const double rtol = std::log(4.0) / std::log1p(r) + 0.02;
            rows.push_back(equality_row(IdentityId::asymptotic_half, input.id(), 0.5, lambda,
                                        r, ratio, 1.0, est.std_error / half, 0.0, rtol));
        }
    }
    return rows;
}

std::vector<IdentityCheckRow> explore_alpha_rows(const std::vector<double>& alpha_grid,
                                                 double lambda,
                                                 const std::vector<double>& r_grid,
                                                 const LabSettings& s) {
    std::vector<IdentityCheckRow> rows;
    std::size_t index = 0;
    for (double alpha : alpha_grid) {
        const InputDistribution input = InputDistribution::gamma(alpha, lambda);
        for (double r : r_grid) {
            ++index;
            if (!(r > 0.0)) continue;
            const ChannelParams pr{alpha, lambda, r};
            validate(pr);
            const MonteCarloEstimate est =
                mutual_information_mc(input, pr, s.mc_samples, row_seed(s, index));
            const double half = 0.5 * std::log1p(r);
            rows.push_back(exploratory_row(IdentityId::explore_alpha, input.id(), alpha,
                                           lambda, r, est.value / half, 1.0,
                                           est.std_error / half, 0.0));
        }
    }
    return rows;
}

std::vector<IdentityCheckRow> channel_sweep_rows(const InputDistribution& dist,
                                                 const ChannelParams& base,
                                                 const std::vector<double>& r_grid,
                                                 const LabSettings& s) {
    std::vector<IdentityCheckRow> rows;
    std::size_t index = 0;
    for (double r : r_grid) {
        ++index;
        const ChannelParams pr{base.alpha, base.lambda, r};
        validate(pr);
        const std::uint64_t seed = row_seed(s, index);
        const auto records = channel_sample(dist, pr, s.mc_samples, seed, 0);

        const ChannelMarginal marg(dist, pr);
        if (marg.closed_form()) {
            const GammaParams q = marg.closed_params();
            std::vector<double> values;
            values.reserve(records.size());
            for (const auto& rec : records) values.push_back(rec.x_r);
            const double stat = ks_statistic(
                std::move(values), [&q](double u) { return reg_lower_gamma(q.shape, q.rate * u); });
            rows.push_back(bound_row(IdentityId::channel_ks, dist.id(), pr.alpha, pr.lambda,
                                     r, stat, ks_critical_value(0.01, records.size()), 0.0,
                                     0.0, 0.0));
        }

        // mean of X_r doubles as the origin slope of the transform
        double sum = 0.0;
        for (const auto& rec : records) sum += rec.x_r;
        const double mean = sum / static_cast<double>(records.size());
        double ss = 0.0;
        for (const auto& rec : records) {
            const double d = rec.x_r - mean;
            ss += d * d;
        }
        const double mean_se =
            std::sqrt(ss / (static_cast<double>(records.size()) *
                            (static_cast<double>(records.size()) - 1.0)));
        rows.push_back(equality_row(IdentityId::channel_mgf, dist.id() + "|t=0", pr.alpha,
                                    pr.lambda, r, mean,
                                    pr.alpha / pr.lambda + r * dist.mean(), mean_se, 0.0,
                                    0.0));

        const double window = channel_mgf_window(dist, pr);
        if (window > 0.0) {
            for (int i = 1; i <= 5; ++i) {
                // stay below window/2 so e^{tX_r} keeps a finite second moment
                const double t = window * static_cast<double>(i) / 12.0;
                double es = 0.0, es2 = 0.0;
                for (const auto& rec : records) {
                    const double v = std::exp(t * rec.x_r);
                    es += v;
                    es2 += v * v;
                }
                const auto dn = static_cast<double>(records.size());
                const double emp = es / dn;
                const double emp_se =
                    std::sqrt(std::max(0.0, (es2 - dn * emp * emp) / (dn - 1.0)) / dn);
                char tag[48];
                std::snprintf(tag, sizeof(tag), "|t=%.6g", t);
                rows.push_back(equality_row(IdentityId::channel_mgf, dist.id() + tag,
                                            pr.alpha, pr.lambda, r, channel_mgf(dist, pr, t),
                                            emp, 0.0, emp_se, 0.0));
            }
        }
    }
    return rows;
}

std::vector<IdentityCheckRow> stein_rows(double alpha, double lambda, const LabSettings& s) {
    if (!(alpha > 0.0) || !(lambda > 0.0)) {
        throw std::domain_error("stein_rows: alpha and lambda must be positive");
    }
    const std::size_t n = s.mc_samples;
    std::vector<IdentityCheckRow> rows;

    std::vector<double> normal_batch(n);
    {
        CounterRng rng(s.seed, 7001);
        for (auto& v : normal_batch) v = rng.normal();
    }
    for (const TestFunction& phi : standard_test_functions()) {
        const MonteCarloEstimate est = stein_residual_gaussian(normal_batch, phi);
        rows.push_back(equality_row(IdentityId::stein_gaussian,
                                    "normal(0,1)|" + phi.description, 0.0, 0.0, 0.0,
                                    est.value, 0.0, est.std_error, 0.0, 0.0));
    }

    const auto gamma_batch = InputDistribution::gamma(alpha, lambda).sample(n, s.seed, 7002);
    for (const TestFunction& phi : standard_test_functions()) {
        const MonteCarloEstimate est = stein_residual_gamma(gamma_batch, alpha, lambda, phi);
        rows.push_back(equality_row(IdentityId::stein_gamma,
                                    "gamma|" + phi.description, alpha, lambda, 0.0,
                                    est.value, 0.0, est.std_error, 0.0, 0.0));
    }

    // mismatched pairs: recorded, never gate the exit code
    {
        std::vector<double> shifted(n);
        CounterRng rng(s.seed, 7003);
        for (auto& v : shifted) v = 0.5 + rng.normal();
        const TestFunction& phi = standard_test_functions()[1];  // phi(x) = x
        const MonteCarloEstimate est = stein_residual_gaussian(shifted, phi);
        rows.push_back(exploratory_row(IdentityId::stein_gaussian,
                                       "normal(0.5,1)|" + phi.description + "|mismatch", 0.0,
                                       0.0, 0.0, est.value, 0.0, est.std_error, 0.0));
    }
    {
        const auto batch = InputDistribution::gamma(alpha + 1.0, lambda).sample(n, s.seed, 7004);
        const TestFunction& phi = standard_test_functions()[1];
        const MonteCarloEstimate est = stein_residual_gamma(batch, alpha, lambda, phi);
        rows.push_back(exploratory_row(IdentityId::stein_gamma,
                                       "gamma-shape+1|" + phi.description + "|mismatch",
                                       alpha, lambda, 0.0, est.value, 0.0, est.std_error,
                                       0.0));
    }
    return rows;
}

void sort_rows(std::vector<IdentityCheckRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const IdentityCheckRow& a, const IdentityCheckRow& b) {
                         if (a.identity != b.identity) {
                             return static_cast<int>(a.identity) < static_cast<int>(b.identity);
                         }
                         if (a.input_id != b.input_id) return a.input_id < b.input_id;
                         if (a.alpha != b.alpha) return a.alpha < b.alpha;
                         if (a.lambda != b.lambda) return a.lambda < b.lambda;
                         return a.r < b.r;
                     });
}

std::vector<IdentityCheckRow> run_jobs(std::vector<RowJob> jobs, std::size_t workers) {
    std::vector<std::vector<IdentityCheckRow>> results(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    if (jobs.empty()) return {};
    workers = std::clamp<std::size_t>(workers, 1, jobs.size());

    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const auto start = std::chrono::steady_clock::now();
            try {
                results[i] = jobs[i]();
            } catch (...) {
                errors[i] = std::current_exception();
                continue;
            }
            const double ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
            for (auto& row : results[i]) row.wall_ms = ms / std::max<std::size_t>(1, results[i].size());
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<IdentityCheckRow> rows;
    for (auto& part : results) {
        rows.insert(rows.end(), part.begin(), part.end());
    }
    sort_rows(rows);
    return rows;
}

}  // namespace gammachan
