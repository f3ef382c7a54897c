#pragma once

namespace bim::specfun {

// Glaisher-Kinkelin constant, 20 significant digits.
inline constexpr double kGlaisher = 1.2824271291006226369;
inline constexpr double kEulerGamma = 0.57721566490153286061;

struct PhysicalInputs {
    double m;  // mass parameter, > 0 in the ordered phase
    double h;  // scaling boundary magnetic field
    double y;  // distance from the boundary, > 0
};

struct DimensionlessPoint {
    double t;       // 2*m*y
    double lambda;  // 4*pi*h^2/m
};

// Maps (m, h, y) to the dimensionless pair (t, lambda). Throws std::domain_error
// for non-positive m or y.
DimensionlessPoint to_dimensionless(const PhysicalInputs& in);

// Bulk spontaneous magnetization 2^(1/12) e^(-1/8) A^(3/2) m^(1/8).
double sigma0(double m);

// Modified Bessel function K_0 or K_1. Relative accuracy <= 1e-13 on
// x in [1e-6, 700]. Throws std::domain_error for x <= 0, std::overflow_error
// once e^-x underflows (x > ~745).
double bessel_k(int order, double x);

// e^x K_n(x); safe throughout the large-x range.
double bessel_k_scaled(int order, double x);

// Euler Gamma on the positive axis.
double gamma_fn(double x);

// Tricomi confluent hypergeometric function Psi(a, c, x), a > 0, x > 0,
// evaluated from its integral representation.
double tricomi_psi(double a, double c, double x);

namespace detail {
// Split-range routes exposed for the overlap validation test.
double bessel_k_series(int order, double x);    // small-x ascending series
double bessel_k_integral(int order, double x);  // exp(x) K_n(x) via cosh-integral
}  // namespace detail

}  // namespace bim::specfun
