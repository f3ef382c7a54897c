#include "bim/specfun.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bim/quadrature.hpp"

namespace bim::specfun {

DimensionlessPoint to_dimensionless(const PhysicalInputs& in) {
    if (!(in.m > 0.0)) throw std::domain_error("to_dimensionless: m must be positive");
    if (!(in.y > 0.0)) throw std::domain_error("to_dimensionless: y must be positive");
    return {2.0 * in.m * in.y, 4.0 * M_PI * in.h * in.h / in.m};
}

double sigma0(double m) {
    if (!(m > 0.0)) throw std::domain_error("sigma0: m must be positive");
    static const double base =
        std::pow(2.0, 1.0 / 12.0) * std::exp(-0.125) * std::pow(kGlaisher, 1.5);
    return base * std::pow(m, 0.125);
}

namespace detail {

// Ascending series, A&S 9.6.10-9.6.11; used for x < 2 where it converges in a
// handful of terms without significant cancellation.
double bessel_k_series(int order, double x) {
    const double q = 0.25 * x * x;
    const double lhalf = std::log(0.5 * x);
    if (order == 0) {
        // K0 = -(ln(x/2)+gamma) I0 + sum_{k>=1} H_k q^k/(k!)^2
        double term = 1.0;  // q^k/(k!)^2 at k=0
        double i0 = 1.0;
        double sum = 0.0;
        double hk = 0.0;
        for (int k = 1; k < 60; ++k) {
            term *= q / (static_cast<double>(k) * k);
            hk += 1.0 / k;
            i0 += term;
            sum += term * hk;
            if (term < 1e-18 * i0) break;
        }
        return -(lhalf + kEulerGamma) * i0 + sum;
    }
    // K1 = 1/x + ln(x/2) I1 - (x/4) sum_{k>=0} [psi(k+1)+psi(k+2)] q^k/(k!(k+1)!)
    double i1 = 1.0;   // I1/(x/2) accumulator: sum q^k/(k!(k+1)!)
    double term = 1.0;
    double psum = (-kEulerGamma) + (1.0 - kEulerGamma);  // psi(1)+psi(2)
    double sum = psum;
    double psi1 = -kEulerGamma, psi2 = 1.0 - kEulerGamma;
    for (int k = 1; k < 60; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1));
        psi1 += 1.0 / k;
        psi2 += 1.0 / (k + 1);
        i1 += term;
        sum += term * (psi1 + psi2);
        if (term < 1e-18 * i1) break;
    }
    return 1.0 / x + lhalf * (0.5 * x) * i1 - 0.25 * x * sum;
}

// e^x K_n(x) = int_0^inf e^{-x(cosh t - 1)} cosh(nt) dt by the offset
// trapezoidal rule. The integrand decays doubly exponentially, so the rule
// converges geometrically; the step shrinks like x^{-1/2} to track the
// narrowing of the integrand at large x.
double bessel_k_integral(int order, double x) {
    const double h = std::min(0.18, 0.65 / std::sqrt(x));
    const double t_max = std::acosh(1.0 + 45.0 / x);
    double sum = 0.5;  // t = 0 endpoint: integrand = 1, half weight
    for (int k = 1;; ++k) {
        const double t = k * h;
        if (t > t_max) break;
        const double f = std::exp(-x * (std::cosh(t) - 1.0)) * (order == 0 ? 1.0 : std::cosh(t));
        sum += f;
    }
    return h * sum;
}

}  // namespace detail

double bessel_k_scaled(int order, double x) {
    if (order != 0 && order != 1) throw std::domain_error("bessel_k: order must be 0 or 1");
    if (!(x > 0.0)) throw std::domain_error("bessel_k: x must be positive");
    if (x < 2.0) return detail::bessel_k_series(order, x) * std::exp(x);
    return detail::bessel_k_integral(order, x);
}

double bessel_k(int order, double x) {
    if (order != 0 && order != 1) throw std::domain_error("bessel_k: order must be 0 or 1");
    if (!(x > 0.0)) throw std::domain_error("bessel_k: x must be positive");
    if (x < 2.0) return detail::bessel_k_series(order, x);
    const double ex = std::exp(-x);
    if (ex == 0.0)
        throw std::overflow_error("bessel_k: e^-x underflows at x = " + std::to_string(x) +
                                  "; use bessel_k_scaled");
    return detail::bessel_k_integral(order, x) * ex;
}

double gamma_fn(double x) {
    if (!(x > 0.0)) throw std::domain_error("gamma_fn: x must be positive");
    return std::tgamma(x);
}

double tricomi_psi(double a, double c, double x) {
    if (!(a > 0.0)) throw std::domain_error("tricomi_psi: a must be positive");
    if (!(x > 0.0)) throw std::domain_error("tricomi_psi: x must be positive");
    // Psi(a,c,x) = (1/Gamma(a)) int_0^1 e^{-x s/(1-s)} s^{a-1} (1-s)^{-c} ds,
    // the t = s/(1-s) image of the defining Laplace integral. Tanh-sinh handles
    // the algebraic endpoint singularities.
    auto integrand = [&](double s, double onems) -> double {
        const double expo = -x * s / onems;
        if (expo < -745.0) return 0.0;
        return std::exp(expo + (a - 1.0) * std::log(s) - c * std::log(onems));
    };
    auto res = quad::tanh_sinh_01(integrand, 1e-14, 12, 8);
    if (!res.converged)
        throw std::runtime_error("tricomi_psi: quadrature did not converge (estimate " +
                                 std::to_string(res.value / std::tgamma(a)) + ")");
    return res.value / std::tgamma(a);
}

}  // namespace bim::specfun
