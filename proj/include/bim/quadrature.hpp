#pragma once

#include <functional>
#include <vector>

namespace bim::quad {

// Gauss-Legendre rule on [-1, 1], nodes ascending.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
    explicit GaussLegendre(int n);
};

// Cached rule lookup (rules are immutable once built).
const GaussLegendre& gauss_legendre(int n);

// Fixed-order Gauss-Legendre on [a, b].
double gl_integrate(const std::function<double(double)>& f, double a, double b, int order);

// Composite Gauss-Legendre: [a, b] split into equal panels.
double gl_composite(const std::function<double(double)>& f, double a, double b, int order,
                    int panels);

struct TanhSinhResult {
    double value = 0.0;
    double abs_err = 0.0;
    int level = 0;
    bool converged = false;
};

// Tanh-sinh quadrature on (0, 1) for integrands with endpoint singularities.
// The integrand receives (s, 1 - s), both computed without cancellation.
// min_level pins the refinement depth so the quadrature error varies smoothly
// with integrand parameters (finite-difference callers rely on that).
TanhSinhResult tanh_sinh_01(const std::function<double(double, double)>& f, double rel_tol,
                            int max_level = 12, int min_level = 3);

// Adaptive Simpson on [a, b]; used as an independent cross-check rule in tests
// and for one-off integrals where no structure is known.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 50);

}  // namespace bim::quad
