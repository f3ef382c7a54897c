#pragma once

#include <memory>
#include <vector>

#include "bim/painleve.hpp"

namespace bim::correlators {

struct CorrelatorBundle {
    double t;
    double G;        // sigma0 ch(phi/2) e^{J/4}
    double G_tilde;  // sigma0 sh(phi/2) e^{J/4}
    double dG, dG_tilde;
    double d2G, d2G_tilde;
    double J;  // int_t^inf r (sh^2 phi - phi'^2) dr
};

// Bulk mirror-pair correlators, the Painleve closed forms for the free/fixed
// magnetization, and the integral identities that tie them together. All
// quantities at m = 1; the sigma0(m) prefactor restores physical units.
class Correlators {
public:
    explicit Correlators(std::shared_ptr<const painleve::PainleveTable> table);

    double tail_J(double t) const;
    CorrelatorBundle pair_correlators(double t) const;

    double sigma_free(double t) const;   // absolute value at m = 1
    double sigma_fixed(double t) const;

    double log_sigma_free(double t) const;   // ln(sigma_free / sigma0)
    double log_sigma_fixed(double t) const;  // ln(sigma_fixed / sigma0)
    double dlog_sigma_free(double t) const;  // d/dt ln sigma_free
    double dlog_sigma_fixed(double t) const;
    double d2log_sigma_free(double t) const;

    // int_0^inf (1 - e^{-phi}) dr; equals ln 2 analytically.
    double ln2_identity() const;

    double sigma0() const { return sigma0_; }
    const painleve::PainleveTable& table() const { return *table_; }
    std::shared_ptr<const painleve::PainleveTable> table_ptr() const { return table_; }

private:
    struct Integrands {
        double w_j;      // r (sh^2 phi - phi'^2)
        double w_free;   // 1 - e^phi   + (r/2)(sh^2 phi - phi'^2)
        double w_fixed;  // e^{-phi} - 1 + (r/2)(sh^2 phi - phi'^2)
        double w_ln2;    // 1 - e^{-phi}
    };
    Integrands integrands_at(const painleve::PainleveTable::Point& p, double r) const;

    // cum*[i] = integral of w over [knots[i], r_max]
    double cum_lookup(const std::vector<double>& cum, int which, double t) const;

    std::shared_ptr<const painleve::PainleveTable> table_;
    std::vector<double> cum_j_, cum_free_, cum_fixed_, cum_ln2_;
    double tail_j_ = 0.0, tail_free_ = 0.0, tail_fixed_ = 0.0, tail_ln2_ = 0.0;
    double sigma0_ = 0.0;
};

}  // namespace bim::correlators
