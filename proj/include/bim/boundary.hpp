#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bim/correlators.hpp"

namespace bim::boundary {

enum class Branch { stable, metastable, highT_fixed };

const char* branch_name(Branch b);

struct USolverOptions {
    double t0 = 12.0;       // seeding radius; clamped to r_max
    double rel_tol = 1e-12;
    double abs_tol = 1e-16;  // tight so the backward-growing mode stays clean
    int seed_nodes = 64;     // quadrature order of the seeding oracle
};

struct ProfileMeta {
    double t0 = 0.0;
    std::string seed_method;
    int seed_order = 0;  // truncation order of the seeding oracle
    USolverOptions options;
};

struct MagnetizationProfile {
    double lambda = 0.0;
    Branch branch = Branch::stable;
    std::vector<double> ts;           // increasing evaluation grid
    std::vector<double> u;            // u(t, lambda)
    std::vector<double> du;           // u'(t, lambda)
    std::vector<double> sigma_ratio;  // sigma / sigma0
    std::vector<double> sigma_abs;    // conformal normalization at m = 1
    ProfileMeta meta;
    std::shared_ptr<const correlators::Correlators> corr;
};

// Solve u'' - (phi' - ch phi + lambda) u' + (lambda/2)(phi' - ch phi + 1) u = 0
// backward from t0, seeded with the K=2 form-factor ratio u = sigma_FF/sigma_free.
// The grid ts must be increasing and lie within [t_min, t0].
MagnetizationProfile solve_u(std::shared_ptr<const correlators::Correlators> corr, double lambda,
                             std::vector<double> ts, const USolverOptions& opt = {});

// Metastable branch for 0 < lambda < 1, seeded by the two-term asymptotic
// u = -1 + sqrt(lambda/(2-lambda)) e^{-(1-lambda) t}.
MagnetizationProfile solve_metastable(std::shared_ptr<const correlators::Correlators> corr,
                                      double lambda, std::vector<double> ts,
                                      const USolverOptions& opt = {});

// High-temperature fixed-b.c. profile, sigma = e^{-t/2} sigma_fixed(t).
// The u column is not defined in this phase and is stored as 0.
MagnetizationProfile highT_profile(std::shared_ptr<const correlators::Correlators> corr,
                                   std::vector<double> ts);

// (sigma/sigma0, sigma) at any t inside the profile grid; u is interpolated
// with the stored derivative, sigma_free comes from the attached correlators.
std::pair<double, double> magnetization(const MagnetizationProfile& profile, double t);

double sigma_fixed_highT(const correlators::Correlators& corr, double t);
inline double sigma_free_highT() { return 0.0; }

// Critical-bulk reference 2^{1/4} lambda^{1/2} t^{3/8} Psi(1/2, 1, lambda t).
double massless_reference(double lambda, double t);

struct SigmaDerivatives {
    double s;    // sigma
    double ds;   // sigma'
    double d2s;  // sigma''
};

// Residual of the second-order equation for sigma itself (the un-substituted
// form whose coefficients are built from G, G~ and their derivatives).
double full_ode_residual(const correlators::CorrelatorBundle& b, const SigmaDerivatives& s,
                         double lambda);

// sigma-derivative triple for sigma = u * sigma_free given the u-solver state.
SigmaDerivatives sigma_derivatives_from_u(const correlators::Correlators& corr, double t, double u,
                                          double du, double lambda);

}  // namespace bim::boundary
