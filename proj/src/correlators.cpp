#include "bim/correlators.hpp"

#include <cmath>
#include <stdexcept>

#include "bim/quadrature.hpp"
#include "bim/specfun.hpp"

namespace bim::correlators {

namespace {

constexpr int kIntervalOrder = 12;  // Gauss-Legendre order per knot interval
constexpr double kTailSpan = 50.0;  // quadrature window beyond r_max

// Integrands with phi replaced by its exponential tail (2/pi) K0; used for the
// t-independent segments beyond r_max where the table ends.
double tail_integrand_free(double r) {
    const double phi = 2.0 / M_PI * bim::specfun::bessel_k(0, r);
    const double dphi = -2.0 / M_PI * bim::specfun::bessel_k(1, r);
    const double sh = std::sinh(phi);
    return -std::expm1(phi) + 0.5 * r * (sh * sh - dphi * dphi);
}

double tail_integrand_fixed(double r) {
    const double phi = 2.0 / M_PI * bim::specfun::bessel_k(0, r);
    const double dphi = -2.0 / M_PI * bim::specfun::bessel_k(1, r);
    const double sh = std::sinh(phi);
    return std::expm1(-phi) + 0.5 * r * (sh * sh - dphi * dphi);
}

double tail_integrand_ln2(double r) {
    const double phi = 2.0 / M_PI * bim::specfun::bessel_k(0, r);
    return -std::expm1(-phi);
}

}  // namespace

Correlators::Integrands Correlators::integrands_at(const painleve::PainleveTable::Point& p,
                                                   double r) const {
    const double sh = std::sinh(p.phi);
    const double core = sh * sh - p.dphi * p.dphi;
    Integrands w;
    w.w_j = r * core;
    w.w_free = -std::expm1(p.phi) + 0.5 * r * core;
    w.w_fixed = std::expm1(-p.phi) + 0.5 * r * core;
    w.w_ln2 = -std::expm1(-p.phi);
    return w;
}

Correlators::Correlators(std::shared_ptr<const painleve::PainleveTable> table)
    : table_(std::move(table)) {
    if (!table_) throw std::invalid_argument("Correlators: null table");
    sigma0_ = specfun::sigma0(1.0);

    const auto& knots = table_->knots();
    const std::size_t n = knots.size();
    cum_j_.assign(n, 0.0);
    cum_free_.assign(n, 0.0);
    cum_fixed_.assign(n, 0.0);
    cum_ln2_.assign(n, 0.0);

    const auto& rule = quad::gauss_legendre(kIntervalOrder);
    for (std::size_t i = n - 1; i-- > 0;) {
        const double a = knots[i], b = knots[i + 1];
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double sj = 0.0, sfree = 0.0, sfixed = 0.0, sln2 = 0.0;
        for (int k = 0; k < kIntervalOrder; ++k) {
            const double r = mid + half * rule.nodes[k];
            const auto w = integrands_at(table_->eval_in_interval(i, r), r);
            sj += rule.weights[k] * w.w_j;
            sfree += rule.weights[k] * w.w_free;
            sfixed += rule.weights[k] * w.w_fixed;
            sln2 += rule.weights[k] * w.w_ln2;
        }
        cum_j_[i] = cum_j_[i + 1] + half * sj;
        cum_free_[i] = cum_free_[i + 1] + half * sfree;
        cum_fixed_[i] = cum_fixed_[i + 1] + half * sfixed;
        cum_ln2_[i] = cum_ln2_[i + 1] + half * sln2;
    }

    // Convergence cross-check for the knot-partition quadrature: an order-8
    // pass over the J integrand must reproduce the order-12 total.
    double check_j = 0.0;
    const auto& rule8 = quad::gauss_legendre(8);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double mid = 0.5 * (knots[i] + knots[i + 1]);
        const double half = 0.5 * (knots[i + 1] - knots[i]);
        double s = 0.0;
        for (int k = 0; k < 8; ++k) {
            const double r = mid + half * rule8.nodes[k];
            s += rule8.weights[k] * integrands_at(table_->eval_in_interval(i, r), r).w_j;
        }
        check_j += half * s;
    }
    if (std::abs(check_j - cum_j_.front()) > 1e-9 * std::max(1.0, std::abs(cum_j_.front())))
        throw std::runtime_error(
            "Correlators: knot quadrature did not converge (order 12 vs 8: " +
            std::to_string(cum_j_.front()) + " vs " + std::to_string(check_j) + ")");

    // Tail segments [r_max, inf): phi -> (2/pi) K0 there. The J tail has a
    // closed form from d/dr[r^2(K0^2-K1^2)] = 2 r K0^2 and
    // d/dr[-r K0 K1] = r(K0^2+K1^2); the sh^2-phi^2 remainder is O(e^{-4R}).
    const double R = table_->r_max();
    const double k0 = specfun::bessel_k(0, R), k1 = specfun::bessel_k(1, R);
    tail_j_ = 4.0 / (M_PI * M_PI) * (R * R * (k1 * k1 - k0 * k0) - R * k0 * k1);
    tail_free_ = quad::gl_composite(tail_integrand_free, R, R + kTailSpan, 16, 25);
    tail_fixed_ = quad::gl_composite(tail_integrand_fixed, R, R + kTailSpan, 16, 25);
    tail_ln2_ = quad::gl_composite(tail_integrand_ln2, R, R + kTailSpan, 16, 25);
}

double Correlators::cum_lookup(const std::vector<double>& cum, int which, double t) const {
    const auto& knots = table_->knots();
    if (!(t >= knots.front() && t <= knots.back()))
        throw std::out_of_range("Correlators: t outside [t_min, r_max]");
    auto it = std::upper_bound(knots.begin(), knots.end(), t);
    std::size_t i = static_cast<std::size_t>(it - knots.begin());
    if (i > 0) --i;
    if (i + 1 >= knots.size()) i = knots.size() - 2;
    // partial segment [t, knots[i+1]]
    const auto& rule = quad::gauss_legendre(kIntervalOrder);
    const double a = t, b = knots[i + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int k = 0; k < kIntervalOrder; ++k) {
        const double r = mid + half * rule.nodes[k];
        const auto w = integrands_at(table_->eval_in_interval(i, r), r);
        s += rule.weights[k] *
             (which == 0 ? w.w_j : which == 1 ? w.w_free : which == 2 ? w.w_fixed : w.w_ln2);
    }
    return half * s + cum[i + 1];
}

double Correlators::tail_J(double t) const { return cum_lookup(cum_j_, 0, t) + tail_j_; }

double Correlators::log_sigma_free(double t) const {
    const auto p = table_->eval(t);
    return -0.25 * p.phi + 0.25 * (cum_lookup(cum_free_, 1, t) + tail_free_);
}

double Correlators::log_sigma_fixed(double t) const {
    const auto p = table_->eval(t);
    return 0.25 * p.phi + 0.25 * (cum_lookup(cum_fixed_, 2, t) + tail_fixed_);
}

double Correlators::sigma_free(double t) const { return sigma0_ * std::exp(log_sigma_free(t)); }

double Correlators::sigma_fixed(double t) const { return sigma0_ * std::exp(log_sigma_fixed(t)); }

double Correlators::dlog_sigma_free(double t) const {
    const auto p = table_->eval(t);
    const auto w = integrands_at(p, t);
    return -0.25 * p.dphi - 0.25 * w.w_free;
}

double Correlators::dlog_sigma_fixed(double t) const {
    const auto p = table_->eval(t);
    const auto w = integrands_at(p, t);
    return 0.25 * p.dphi - 0.25 * w.w_fixed;
}

double Correlators::d2log_sigma_free(double t) const {
    const auto p = table_->eval(t);
    // d/dt of the free integrand at the moving endpoint
    const double sh = std::sinh(p.phi), ch = std::cosh(p.phi);
    const double core = sh * sh - p.dphi * p.dphi;
    const double dcore = 2.0 * p.dphi * (sh * ch - p.d2phi);
    const double dwfree = -std::exp(p.phi) * p.dphi + 0.5 * core + 0.5 * t * dcore;
    return -0.25 * p.d2phi - 0.25 * dwfree;
}

CorrelatorBundle Correlators::pair_correlators(double t) const {
    const auto p = table_->eval(t);
    CorrelatorBundle b;
    b.t = t;
    b.J = tail_J(t);

    const double sh = std::sinh(p.phi), ch = std::cosh(p.phi);
    const double core = sh * sh - p.dphi * p.dphi;
    const double jp = -t * core;                                    // J'
    const double jpp = -core - t * 2.0 * p.dphi * (sh * ch - p.d2phi);  // J''

    const double E = std::exp(0.25 * b.J);
    const double Ep = E * 0.25 * jp;
    const double Epp = E * (0.25 * jpp + 0.0625 * jp * jp);

    const double C = std::cosh(0.5 * p.phi), S = std::sinh(0.5 * p.phi);
    const double Cp = 0.5 * p.dphi * S;
    const double Sp = 0.5 * p.dphi * C;
    const double Cpp = 0.5 * p.d2phi * S + 0.25 * p.dphi * p.dphi * C;
    const double Spp = 0.5 * p.d2phi * C + 0.25 * p.dphi * p.dphi * S;

    b.G = sigma0_ * C * E;
    b.G_tilde = sigma0_ * S * E;
    b.dG = sigma0_ * (Cp * E + C * Ep);
    b.dG_tilde = sigma0_ * (Sp * E + S * Ep);
    b.d2G = sigma0_ * (Cpp * E + 2.0 * Cp * Ep + C * Epp);
    b.d2G_tilde = sigma0_ * (Spp * E + 2.0 * Sp * Ep + S * Epp);
    return b;
}

double Correlators::ln2_identity() const {
    // (0, t_min): 1 - e^{-phi} = 1 + r Omega / 2 from the small-r closed form,
    // integrated exactly: eps - (eps^2/4)(Omega(eps) - 1/2).
    const double eps = table_->t_min();
    const double omega = std::log(std::exp(specfun::kEulerGamma) * eps / 8.0);
    const double head = eps - 0.25 * eps * eps * (omega - 0.5);
    return head + cum_ln2_.front() + tail_ln2_;
}

}  // namespace bim::correlators
