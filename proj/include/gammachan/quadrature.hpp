#pragma once

#include <functional>
#include <vector>

namespace gammachan {

struct IntegrationResult {
    double value = 0.0;
    double abs_error = 0.0;  // estimated
    int evaluations = 0;
    bool converged = false;
};

// Truncated integration domain with declared mass left outside and initial
// panel breakpoints (log-spaced near 0 so endpoint singularities like
// u^{alpha-1} are isolated in their own panels).
struct QuadratureGrid {
    double lo = 0.0;
    double hi = 1.0;
    double tail_mass = 0.0;
    double rel_tol = 1e-9;
    std::vector<double> breakpoints;  // ascending, first == lo, last == hi

    static QuadratureGrid log_spaced(double lo, double hi, double tail_mass,
                                     double rel_tol = 1e-9);
};

using Integrand = std::function<double(double)>;

// Globally adaptive Gauss-Kronrod 7-15 over [a, b].
IntegrationResult integrate(const Integrand& f, double a, double b,
                            double rel_tol = 1e-9, double abs_tol = 0.0,
                            int max_intervals = 4000);

IntegrationResult integrate(const Integrand& f, const QuadratureGrid& grid);

// Same, but enforces the accuracy contract: estimated relative error above
// 1e-6 (or abs_floor for near-zero integrals) throws AccuracyError.
double integrate_checked(const Integrand& f, const QuadratureGrid& grid,
                         double abs_floor = 1e-12);

// Nodes and weights on [-1, 1]; exact through polynomial degree 2n-1.
struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;
};
GaussLegendre gauss_legendre(int n);

}  // namespace gammachan
