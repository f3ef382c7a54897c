#include "bim/boundary.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <stdexcept>

#include "bim/formfactor.hpp"
#include "bim/specfun.hpp"

namespace bim::boundary {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

const char* branch_name(Branch b) {
    switch (b) {
        case Branch::stable: return "stable";
        case Branch::metastable: return "metastable";
        case Branch::highT_fixed: return "highT";
    }
    return "unknown";
}

namespace {

void check_grid(const std::vector<double>& ts, double t_min, double t0) {
    if (ts.size() < 1) throw std::invalid_argument("solve_u: empty grid");
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
        if (!(ts[i] < ts[i + 1])) throw std::invalid_argument("solve_u: grid must be increasing");
    if (!(ts.front() >= t_min && ts.back() <= t0))
        throw std::invalid_argument("solve_u: grid must lie within [t_min, t0]");
}

// Backward integration of the u equation in s = ln t. With w = du/ds the
// system reads w' = w + t p(t) w - t^2 q(t) u, which keeps the step density
// proportional to the logarithmic structure of u at small t.
MagnetizationProfile integrate_u(std::shared_ptr<const correlators::Correlators> corr,
                                 double lambda, std::vector<double> ts, double t0, double u0,
                                 double du0, Branch branch, const USolverOptions& opt) {
    const auto& table = corr->table();
    MagnetizationProfile prof;
    prof.lambda = lambda;
    prof.branch = branch;
    prof.ts = std::move(ts);
    prof.corr = corr;
    prof.meta.t0 = t0;
    prof.meta.options = opt;

    const std::size_t n = prof.ts.size();
    prof.u.assign(n, 0.0);
    prof.du.assign(n, 0.0);
    prof.sigma_ratio.assign(n, 0.0);
    prof.sigma_abs.assign(n, 0.0);

    const double t_lo = table.t_min(), t_hi = table.r_max();
    auto rhs = [&](const State& y, State& dyds, double s) {
        const double t = std::clamp(std::exp(s), t_lo, t_hi);  // fp roundtrip guard
        const auto ph = table.eval(t);
        const double p = ph.dphi - std::cosh(ph.phi) + lambda;
        const double q = 0.5 * lambda * (ph.dphi - std::cosh(ph.phi) + 1.0);
        dyds[0] = y[1];
        dyds[1] = y[1] * (1.0 + t * p) - t * t * q * y[0];
    };

    State y{u0, t0 * du0};
    const double s0 = std::log(t0);
    const double s_end = std::log(prof.ts.front());

    std::ptrdiff_t next = static_cast<std::ptrdiff_t>(n) - 1;
    // grid points exactly at t0 take the seed values directly
    while (next >= 0 && prof.ts[next] >= t0) {
        prof.u[next] = u0;
        prof.du[next] = du0;
        --next;
    }

    auto stepper = odeint::make_dense_output(opt.abs_tol, opt.rel_tol,
                                             odeint::runge_kutta_dopri5<State>());
    stepper.initialize(y, s0, -1e-3);
    while (next >= 0) {
        // keep the trial step inside [s_end, s0] so the stage evaluations
        // never leave the table's domain
        const double s_cur = stepper.current_time();
        if (s_cur + stepper.current_time_step() < s_end) {
            const double rest = s_end - s_cur;
            if (rest > -1e-14) break;
            stepper.initialize(stepper.current_state(), s_cur, rest);
        }
        try {
            stepper.do_step(rhs);
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("solve_u: integration failure near t = ") +
                                     std::to_string(std::exp(stepper.current_time())) + ": " +
                                     e.what());
        }
        const double s_new = stepper.current_time();
        if (!std::isfinite(s_new) || !std::isfinite(stepper.current_state()[0]))
            throw std::runtime_error("solve_u: non-finite state near t = " +
                                     std::to_string(std::exp(s_new)));
        // 1e-12 slack tolerates the exp/log roundtrip at the interval ends
        while (next >= 0 && std::log(prof.ts[next]) >= s_new - 1e-12) {
            State yi;
            stepper.calc_state(std::log(prof.ts[next]), yi);
            prof.u[next] = yi[0];
            prof.du[next] = yi[1] / prof.ts[next];
            --next;
        }
        if (s_new <= s_end + 1e-14) break;
    }
    if (next >= 0) throw std::runtime_error("solve_u: integration stalled");

    const double s0_abs = corr->sigma0();
    for (std::size_t i = 0; i < n; ++i) {
        const double ratio_free = std::exp(corr->log_sigma_free(prof.ts[i]));
        prof.sigma_ratio[i] = prof.u[i] * ratio_free;
        prof.sigma_abs[i] = prof.sigma_ratio[i] * s0_abs;
    }
    return prof;
}

}  // namespace

MagnetizationProfile solve_u(std::shared_ptr<const correlators::Correlators> corr, double lambda,
                             std::vector<double> ts, const USolverOptions& opt) {
    if (!corr) throw std::invalid_argument("solve_u: null correlators");
    if (lambda < 0.0) throw std::domain_error("solve_u: lambda must be >= 0");
    const auto& table = corr->table();
    const double t0 = std::min(table.r_max(), opt.t0);
    check_grid(ts, table.t_min(), t0);

    // Seed from the K=2 form-factor oracle: u = sigma_FF / sigma_free, with
    // the denominator taken as the lambda = 0 series on the same quadrature
    // grid, so ln u0 = sum_{k<=2} (f_k(lambda) - f_k(0)) / k. The residual
    // seed error is O(e^{-3 t0}), which keeps the backward-growing
    // e^{(1-lambda)(t0-t)} mode below 1e-9 for every lambda >= 0, and the
    // same-grid difference makes the lambda = 0 seed exactly (1, 0).
    double s_ff = 0.0, ds_ff = 0.0;
    for (int k = 1; k <= 2; ++k) {
        s_ff += (formfactor::ff_term(k, t0, lambda, opt.seed_nodes) -
                 formfactor::ff_term(k, t0, 0.0, opt.seed_nodes)) /
                k;
        ds_ff += (formfactor::ff_term_dt(k, t0, lambda, opt.seed_nodes) -
                  formfactor::ff_term_dt(k, t0, 0.0, opt.seed_nodes)) /
                 k;
    }
    const double u0 = std::exp(s_ff);
    const double du0 = u0 * ds_ff;

    auto prof = integrate_u(corr, lambda, std::move(ts), t0, u0, du0, Branch::stable, opt);
    prof.meta.seed_method = "formfactor-ratio";
    prof.meta.seed_order = 2;
    return prof;
}

MagnetizationProfile solve_metastable(std::shared_ptr<const correlators::Correlators> corr,
                                      double lambda, std::vector<double> ts,
                                      const USolverOptions& opt) {
    if (!corr) throw std::invalid_argument("solve_metastable: null correlators");
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::domain_error("solve_metastable: lambda must lie in (0, 1)");
    const auto& table = corr->table();
    const double t0 = std::min(table.r_max(), opt.t0);
    check_grid(ts, table.t_min(), t0);

    const double coef = std::sqrt(lambda / (2.0 - lambda));
    const double decay = std::exp(-(1.0 - lambda) * t0);
    const double u0 = -1.0 + coef * decay;
    const double du0 = -(1.0 - lambda) * coef * decay;  // exact d/dt of the seed

    auto prof = integrate_u(corr, lambda, std::move(ts), t0, u0, du0, Branch::metastable, opt);
    prof.meta.seed_method = "metastable-two-term";
    prof.meta.seed_order = 2;
    return prof;
}

MagnetizationProfile highT_profile(std::shared_ptr<const correlators::Correlators> corr,
                                   std::vector<double> ts) {
    if (!corr) throw std::invalid_argument("highT_profile: null correlators");
    check_grid(ts, corr->table().t_min(), corr->table().r_max());
    MagnetizationProfile prof;
    prof.lambda = 0.0;
    prof.branch = Branch::highT_fixed;
    prof.ts = std::move(ts);
    prof.corr = corr;
    prof.meta.t0 = corr->table().r_max();
    prof.meta.seed_method = "highT-closed-form";
    const std::size_t n = prof.ts.size();
    prof.u.assign(n, 0.0);  // u is undefined in the disordered phase
    prof.du.assign(n, 0.0);
    prof.sigma_ratio.resize(n);
    prof.sigma_abs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        prof.sigma_ratio[i] = sigma_fixed_highT(*corr, prof.ts[i]) / corr->sigma0();
        prof.sigma_abs[i] = prof.sigma_ratio[i] * corr->sigma0();
    }
    return prof;
}

std::pair<double, double> magnetization(const MagnetizationProfile& profile, double t) {
    if (profile.ts.empty() || !(t >= profile.ts.front() && t <= profile.ts.back()))
        throw std::out_of_range("magnetization: t outside the profile grid");
    const double s0 = profile.corr->sigma0();
    if (profile.branch == Branch::highT_fixed) {
        const double ratio = sigma_fixed_highT(*profile.corr, t) / s0;
        return {ratio, ratio * s0};
    }
    auto it = std::upper_bound(profile.ts.begin(), profile.ts.end(), t);
    std::size_t i = static_cast<std::size_t>(it - profile.ts.begin());
    if (i > 0) --i;
    if (i + 1 >= profile.ts.size()) i = profile.ts.size() - 2;
    const double h = profile.ts[i + 1] - profile.ts[i];
    const double tau = (t - profile.ts[i]) / h;
    // cubic Hermite on (u, u')
    const double t2 = tau * tau, t3 = t2 * tau;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0, h10 = t3 - 2.0 * t2 + tau;
    const double h01 = -2.0 * t3 + 3.0 * t2, h11 = t3 - t2;
    const double u = h00 * profile.u[i] + h * h10 * profile.du[i] + h01 * profile.u[i + 1] +
                     h * h11 * profile.du[i + 1];
    const double ratio = u * std::exp(profile.corr->log_sigma_free(t));
    return {ratio, ratio * s0};
}

double sigma_fixed_highT(const correlators::Correlators& corr, double t) {
    return std::exp(-0.5 * t) * corr.sigma_fixed(t);
}

double massless_reference(double lambda, double t) {
    if (!(lambda > 0.0)) throw std::domain_error("massless_reference: lambda must be positive");
    if (!(t > 0.0)) throw std::domain_error("massless_reference: t must be positive");
    return std::pow(2.0, 0.25) * std::sqrt(lambda) * std::pow(t, 0.375) *
           specfun::tricomi_psi(0.5, 1.0, lambda * t);
}

double full_ode_residual(const correlators::CorrelatorBundle& b, const SigmaDerivatives& s,
                         double lambda) {
    const double sum = b.G + b.G_tilde;
    const double dsum = b.dG + b.dG_tilde;
    const double d2sum = b.d2G + b.d2G_tilde;
    return sum * s.d2s - (dsum - b.G + lambda * sum) * s.ds +
           0.25 *
               (d2sum - dsum / b.t - 2.0 * b.dG - b.G_tilde + 2.0 * lambda * (dsum + b.G_tilde)) *
               s.s;
}

SigmaDerivatives sigma_derivatives_from_u(const correlators::Correlators& corr, double t, double u,
                                          double du, double lambda) {
    const auto ph = corr.table().eval(t);
    const double p = ph.dphi - std::cosh(ph.phi) + lambda;
    const double q = 0.5 * lambda * (ph.dphi - std::cosh(ph.phi) + 1.0);
    const double d2u = p * du - q * u;

    const double F = corr.sigma_free(t);
    const double L = corr.dlog_sigma_free(t);
    const double Lp = corr.d2log_sigma_free(t);
    SigmaDerivatives s;
    s.s = u * F;
    s.ds = F * (du + u * L);
    s.d2s = F * (d2u + 2.0 * du * L + u * (Lp + L * L));
    return s;
}

}  // namespace bim::boundary
