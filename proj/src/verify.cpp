#include "bim/verify.hpp"

#include <array>
#include <boost/numeric/odeint.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>

#include "bim/boundary.hpp"
#include "bim/correlators.hpp"
#include "bim/formfactor.hpp"
#include "bim/painleve.hpp"
#include "bim/specfun.hpp"

namespace bim::verify {

namespace {

using Clock = std::chrono::steady_clock;
using CorrPtr = std::shared_ptr<const correlators::Correlators>;

std::string fmt(const char* format, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), format, args...);
    return std::string(buf);
}

CorrPtr make_corr(const painleve::SolverConfig& cfg) {
    return std::make_shared<const correlators::Correlators>(
        std::make_shared<painleve::PainleveTable>(painleve::solve_phi(cfg)));
}

std::vector<double> log_grid(double a, double b, int n) {
    std::vector<double> ts(n);
    for (int i = 0; i < n; ++i) ts[i] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
    return ts;
}

struct Fixtures {
    CorrPtr base;    // default config, r_max = 14
    CorrPtr fine;    // t_min = 1e-4 for the sharp crossover peaks
    CorrPtr deep;    // r_max = 24 for the metastable tail diagnostic
};

Fixtures build_fixtures() {
    Fixtures f;
    f.base = make_corr({});
    painleve::SolverConfig cf{};
    cf.t_min = 1e-4;
    f.fine = make_corr(cf);
    painleve::SolverConfig cd{};
    cd.r_max = 24.0;
    f.deep = make_corr(cd);
    return f;
}

Criterion crit_connection() {
    Criterion c{1, "Painleve connection problem"};
    const auto start = Clock::now();
    const auto& table = painleve::solve_phi({});
    const double dev = std::abs(table.eval(0.01).phi - painleve::small_r_reference(0.01));

    painleve::SolverConfig c12{}, c16{};
    c12.r_max = 12.0;
    c16.r_max = 16.0;
    c12.rel_tol = c16.rel_tol = 1e-14;
    c12.abs_tol = c16.abs_tol = 1e-18;
    const auto t12 = painleve::solve_phi(c12);
    const auto t16 = painleve::solve_phi(c16);
    double worst = 0.0;
    for (double r = 1e-3; r <= 12.0; r *= 1.01) {
        worst = std::max(worst, std::abs(t12.eval(r).phi - t16.eval(r).phi));
    }
    c.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = c.seconds < 1.0;
    c.pass = dev < 1e-5 && worst < 1e-9 && in_time;
    c.detail = fmt("|phi(0.01)-smallr|=%.3e (<1e-5), max|phi_12-phi_16|=%.3e (<1e-9)%s", dev,
                   worst, in_time ? "" : ", runtime over 1 s");
    return c;
}

Criterion crit_ln2(const Fixtures& f) {
    Criterion c{2, "ln 2 integral identity"};
    const double v = f.base->ln2_identity();
    c.pass = std::abs(v - std::log(2.0)) <= 1e-4;
    c.detail = fmt("integral=%.6f, |dev|=%.3e (<=1e-4)", v, std::abs(v - std::log(2.0)));
    return c;
}

Criterion crit_first_order(const Fixtures& f) {
    Criterion c{3, "first-order equations for free/fixed closed forms"};
    const auto& corr = *f.base;
    const double s0sq = corr.sigma0() * corr.sigma0();
    double worst = 0.0;
    for (double t = 0.1; t <= 10.0; t *= 1.05) {
        const auto b = corr.pair_correlators(t);
        const double sf = corr.sigma_free(t), dsf = sf * corr.dlog_sigma_free(t);
        const double sx = corr.sigma_fixed(t), dsx = sx * corr.dlog_sigma_fixed(t);
        worst = std::max(
            worst, std::abs(2.0 * (b.G - b.G_tilde) * dsf - (b.dG - b.dG_tilde + b.G_tilde) * sf));
        worst = std::max(
            worst, std::abs(2.0 * (b.G + b.G_tilde) * dsx - (b.dG + b.dG_tilde + b.G_tilde) * sx));
    }
    c.pass = worst < 1e-8 * s0sq;
    c.detail = fmt("max residual=%.3e sigma0^2 (<1e-8)", worst / s0sq);
    return c;
}

Criterion crit_exponents(const Fixtures& f) {
    Criterion c{4, "short-distance exponents and fixed amplitude"};
    const auto& corr = *f.base;
    auto slope = [&](auto fn) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (double t = 1e-3; t <= 1e-2; t *= 1.1) {
            const double x = std::log(t), y = fn(t);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    const double sl_free = slope([&](double t) { return corr.log_sigma_free(t); });
    const double sl_fixed = slope([&](double t) { return corr.log_sigma_fixed(t); });
    const double amp = std::pow(1e-3, 0.125) * corr.sigma_fixed(1e-3) / std::pow(2.0, 0.25);
    c.pass = std::abs(sl_free - 0.375) <= 0.01 && std::abs(sl_fixed + 0.125) <= 0.01 &&
             std::abs(amp - 1.0) <= 0.02;
    c.detail = fmt("slopes %.4f (3/8), %.4f (-1/8); amplitude/2^{1/4}=%.4f (2%%)", sl_free,
                   sl_fixed, amp);
    return c;
}

Criterion crit_oracle(const Fixtures& f, bool quick) {
    Criterion c{5, "main result vs form-factor oracle (K=3)"};
    if (quick) {
        c.skipped = true;
        c.pass = true;
        c.detail = "skipped (--quick)";
        return c;
    }
    const auto start = Clock::now();
    // the tolerance is 5 x the K = 3 truncation bound e^{-(K+1) t}
    double worst_ratio = 0.0, worst_trunc1 = 0.0, worst_trunc4 = 0.0;
    bool ok = true;
    for (double lam : {0.5, 1.0, 2.0, 5.0}) {
        auto prof = boundary::solve_u(f.base, lam, {1.0, 2.0, 4.0});
        for (std::size_t i = 0; i < prof.ts.size(); ++i) {
            const auto est = formfactor::ff_magnetization(prof.ts[i], lam, 3, 64);
            const double dev = std::abs(prof.sigma_ratio[i] - est.value);
            const double bound = 5.0 * std::exp(-4.0 * prof.ts[i]);
            ok = ok && dev <= bound;
            worst_ratio = std::max(worst_ratio, dev / bound);
            if (i == 0) worst_trunc1 = std::max(worst_trunc1, est.trunc_bound);
            if (i == 2) worst_trunc4 = std::max(worst_trunc4, est.trunc_bound);
        }
    }
    c.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = c.seconds < 20.0;
    c.pass = ok && worst_trunc1 <= 3e-4 && worst_trunc4 <= 1e-7 && in_time;
    c.detail =
        fmt("max |dev|/(5 e^{-4t})=%.2e (<1); estimator bounds t=1: %.2e (<3e-4), t=4: %.2e "
            "(<1e-7)%s",
            worst_ratio, worst_trunc1, worst_trunc4, in_time ? "" : "; runtime over 20 s");
    return c;
}

Criterion crit_lambda0(const Fixtures& f) {
    Criterion c{6, "lambda = 0 degeneracy u == 1"};
    auto prof = boundary::solve_u(f.base, 0.0, log_grid(1e-3, 12.0, 300));
    double worst = 0.0;
    for (double u : prof.u) worst = std::max(worst, std::abs(u - 1.0));
    c.pass = worst < 1e-9;
    c.detail = fmt("max|u-1|=%.3e (<1e-9)", worst);
    return c;
}

Criterion crit_crossover(const Fixtures& f) {
    Criterion c{7, "lambda -> infinity crossover to fixed b.c."};
    auto prof = boundary::solve_u(f.base, 200.0, log_grid(0.5, 3.0, 60));
    double worst = 0.0;
    for (std::size_t i = 0; i < prof.ts.size(); ++i) {
        worst = std::max(worst,
                         std::abs(prof.sigma_abs[i] / f.base->sigma_fixed(prof.ts[i]) - 1.0));
    }
    c.pass = worst < 1e-2;
    c.detail = fmt("lambda=200: max|sigma/sigma_fixed - 1|=%.3e (<1e-2)", worst);
    return c;
}

Criterion crit_massless(const Fixtures& f) {
    Criterion c{8, "massless sewing and peak scaling"};
    // peak shape at lambda = 50 against the critical-bulk formula
    const double lam = 50.0;
    std::vector<double> ts;
    for (double x = 0.1; x <= 5.0 * (1.0 + 1e-12); x *= 1.04) ts.push_back(x / lam);
    auto prof = boundary::solve_u(f.fine, lam, ts);
    double smax = 0.0, rmax = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        smax = std::max(smax, prof.sigma_abs[i]);
        rmax = std::max(rmax, boundary::massless_reference(lam, ts[i]));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double shape =
            (prof.sigma_abs[i] / smax) / (boundary::massless_reference(lam, ts[i]) / rmax);
        worst = std::max(worst, std::abs(shape - 1.0));
    }
    // peak location scaling t*(100)/t*(200) = 2 within 15%
    auto peak = [&](double l) {
        auto grid = log_grid(1.5e-4, 0.05, 700);
        auto p = boundary::solve_u(f.fine, l, grid);
        std::size_t best = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (p.sigma_ratio[i] > p.sigma_ratio[best]) best = i;
        }
        return grid[best];
    };
    const double ratio = peak(100.0) / peak(200.0);
    c.pass = worst < 0.02 && std::abs(ratio - 2.0) <= 0.3;
    c.detail = fmt("peak-shape dev=%.4f (<0.02); t*(100)/t*(200)=%.3f (2 +- 0.3)", worst, ratio);
    return c;
}

Criterion crit_two_form(const Fixtures& f) {
    Criterion c{9, "two-form equivalence of the magnetization equation"};
    const auto& corr = *f.base;
    const double s0cubed = std::pow(corr.sigma0(), 3.0);
    double worst = 0.0;
    for (double lam : {0.5, 2.0, 5.0}) {
        auto prof = boundary::solve_u(f.base, lam, {0.5, 1.0, 2.0, 5.0});
        for (std::size_t i = 0; i < prof.ts.size(); ++i) {
            const auto sd = boundary::sigma_derivatives_from_u(corr, prof.ts[i], prof.u[i],
                                                               prof.du[i], lam);
            const auto b = corr.pair_correlators(prof.ts[i]);
            worst = std::max(worst, std::abs(boundary::full_ode_residual(b, sd, lam)));
        }
    }
    c.pass = worst < 1e-6 * s0cubed;
    c.detail = fmt("max residual=%.3e sigma0^3 (<1e-6) at 12 (t,lambda) points",
                   worst / s0cubed);
    return c;
}

Criterion crit_metastable(const Fixtures& f) {
    Criterion c{10, "metastable branch decay and tail diagnostic"};
    const double lam = 0.5;
    // decay-rate fit over [t0-4, t0] with the default seeding radius
    std::vector<double> ts;
    for (double t = 8.0; t <= 12.0001; t += 0.1) ts.push_back(t);
    auto prof = boundary::solve_metastable(f.base, lam, ts);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double x = ts[i], y = std::log(prof.u[i] + 1.0);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    const double rate = -(n * sxy - sx * sy) / (n * sxx - sx * sx);

    // third-term diagnostic: seed far out (t0 = 24) so the window [8, 12] is
    // free of seeding transients, then extrapolate the 1/t tail of
    // (sigma/sigma0 + 1 - leading) t^{3/2} e^t to its constant
    boundary::USolverOptions opt{};
    opt.t0 = 24.0;
    auto mp = boundary::solve_metastable(f.deep, lam, ts, opt);
    const double coef = std::sqrt(lam / (2.0 - lam));
    sx = sy = sxx = sxy = 0;
    n = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double lead = coef * std::exp(-(1.0 - lam) * ts[i]);
        const double diag =
            (mp.sigma_ratio[i] + 1.0 - lead) * std::pow(ts[i], 1.5) * std::exp(ts[i]);
        const double x = 1.0 / ts[i];
        sx += x;
        sy += diag;
        sxx += x * x;
        sxy += x * diag;
        ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    const double target = (1.0 / (4.0 * std::sqrt(2.0 * M_PI))) * (2.0 / lam - 1.0);

    c.pass = std::abs(rate - (1.0 - lam)) <= 0.02 && std::abs(intercept / target - 1.0) <= 0.2;
    c.detail = fmt("decay rate %.4f (0.5 +- 0.02); tail constant %.4f vs %.4f (20%%)", rate,
                   intercept, target);
    return c;
}

Criterion crit_highT(const Fixtures& f) {
    Criterion c{11, "high-temperature phase consistency"};
    namespace odeint = boost::numeric::odeint;
    using S = std::array<double, 1>;
    const auto& corr = *f.base;
    S y{std::exp(-5.0) * corr.sigma_fixed(10.0)};
    auto rhs = [&](const S& s, S& dsdt, double t) {
        const auto b = corr.pair_correlators(t);
        dsdt[0] = (b.dG + b.dG_tilde - b.G) / (2.0 * (b.G + b.G_tilde)) * s[0];
    };
    auto st = odeint::make_dense_output(1e-13, 1e-13, odeint::runge_kutta_dopri5<S>());
    st.initialize(y, 10.0, -0.01);
    double worst = 0.0;
    double next = 10.0;
    while (next > 0.5 - 1e-9) {
        st.do_step(rhs);
        while (next > 0.5 - 1e-9 && next >= st.current_time() - 1e-12) {
            S yi;
            st.calc_state(std::max(next, st.current_time()), yi);
            const double ref = boundary::sigma_fixed_highT(corr, next);
            worst = std::max(worst, std::abs(yi[0] / ref - 1.0));
            next -= 0.25;
        }
    }
    c.pass = worst < 1e-6;
    c.detail = fmt("independent integration vs e^{-t/2} sigma_fixed: max rel dev=%.3e (<1e-6)",
                   worst);
    return c;
}

std::vector<Criterion> run_pass(const Options& opt) {
    Fixtures f = build_fixtures();
    std::vector<Criterion> cs;
    cs.push_back(crit_connection());
    cs.push_back(crit_ln2(f));
    cs.push_back(crit_first_order(f));
    cs.push_back(crit_exponents(f));
    cs.push_back(crit_oracle(f, opt.quick));
    cs.push_back(crit_lambda0(f));
    cs.push_back(crit_crossover(f));
    cs.push_back(crit_massless(f));
    cs.push_back(crit_two_form(f));
    cs.push_back(crit_metastable(f));
    cs.push_back(crit_highT(f));
    return cs;
}

std::string render_pass(const std::vector<Criterion>& cs) {
    std::string out;
    for (const auto& c : cs) {
        out += fmt("criterion %2d [%s] %s: %s\n", c.id,
                   c.skipped ? "skip" : (c.pass ? "pass" : "FAIL"), c.name.c_str(),
                   c.detail.c_str());
    }
    return out;
}

}  // namespace

Report run(const Options& opt) {
    const auto start = Clock::now();
    Report rep;
    rep.criteria = run_pass(opt);

    // criterion 12: a second full pass must reproduce the log byte for byte
    Criterion det{12, "determinism of the verification log"};
    const std::string log1 = render_pass(rep.criteria);
    const std::string log2 = render_pass(run_pass(opt));
    det.pass = (log1 == log2);
    det.detail = det.pass ? "two consecutive runs render identical logs"
                          : "re-run produced a different log";
    rep.criteria.push_back(det);

    rep.all_pass = true;
    for (const auto& c : rep.criteria) rep.all_pass = rep.all_pass && (c.pass || c.skipped);
    rep.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return rep;
}

std::string render(const Report& report) { return render_pass(report.criteria); }

}  // namespace bim::verify
