// bimag: boundary-magnetization profiles from the Painleve-III representation,
// with the form-factor oracle and the built-in verification suite.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bim/boundary.hpp"
#include "bim/correlators.hpp"
#include "bim/formfactor.hpp"
#include "bim/painleve.hpp"
#include "bim/specfun.hpp"
#include "bim/verify.hpp"
#include "json.hpp"

using namespace bim;

namespace {

using json = nlohmann::json;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.14e", v);  // 15 significant digits
    return buf;
}

struct CommonOpts {
    double r_max = 14.0;
    double t_min_cfg = 1e-3;
    double tol = 1e-12;
    std::string format = "csv";
    std::string output;
    double mass = 1.0;
};

painleve::SolverConfig solver_config(const CommonOpts& c) {
    painleve::SolverConfig cfg{};
    cfg.r_max = c.r_max;
    cfg.t_min = c.t_min_cfg;
    cfg.rel_tol = c.tol;
    cfg.abs_tol = 1e-2 * c.tol;
    return cfg;
}

int write_payload(const CommonOpts& c, const std::vector<std::pair<std::string, std::string>>& manifest,
                  const std::vector<std::string>& columns,
                  const std::vector<std::vector<double>>& rows) {
    for (const auto& row : rows) {
        for (double v : row) {
            if (!std::isfinite(v)) {
                std::fprintf(stderr, "bimag: refusing to write non-finite value\n");
                return 1;
            }
        }
    }
    std::string text;
    if (c.format == "json") {
        json j;
        json m;
        for (const auto& [k, v] : manifest) m[k] = v;
        j["manifest"] = m;
        json cols;
        for (std::size_t k = 0; k < columns.size(); ++k) {
            json arr = json::array();
            for (const auto& row : rows) arr.push_back(num(row[k]));
            cols[columns[k]] = arr;
        }
        j["columns"] = cols;
        text = j.dump(2);
        text += "\n";
    } else {
        for (const auto& [k, v] : manifest) text += "# " + k + "=" + v + "\n";
        for (std::size_t k = 0; k < columns.size(); ++k) {
            text += (k ? "," : "") + columns[k];
        }
        text += "\n";
        for (const auto& row : rows) {
            for (std::size_t k = 0; k < row.size(); ++k) {
                text += (k ? "," : "") + num(row[k]);
            }
            text += "\n";
        }
    }
    if (c.output.empty()) {
        std::fputs(text.c_str(), stdout);
        return 0;
    }
    std::ofstream out(c.output, std::ios::binary);
    if (!out) {
        std::fprintf(stderr, "bimag: cannot open output file '%s'\n", c.output.c_str());
        return 1;
    }
    out << text;
    return out.good() ? 0 : 1;
}

std::vector<double> make_grid(double a, double b, int n, const std::string& kind) {
    std::vector<double> ts(n);
    for (int i = 0; i < n; ++i) {
        const double w = static_cast<double>(i) / (n - 1);
        ts[i] = kind == "linear" ? a + (b - a) * w : a * std::pow(b / a, w);
    }
    ts.front() = a;
    ts.back() = b;
    return ts;
}

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--r-max", c.r_max, "asymptotic matching radius");
    cmd->add_option("--tol", c.tol, "solver relative tolerance");
    cmd->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--output", c.output, "output path (stdout when omitted)");
    cmd->add_option("--mass", c.mass, "mass parameter for absolute units")
        ->check(CLI::PositiveNumber);
}

// Flat key=value config support. Values from the file are spliced in directly
// after the subcommand token, so explicit flags (which come later) override
// them, and defaults lose to both.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string path;
    for (std::size_t i = 0; i < args.size();) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + i);
        } else {
            ++i;
        }
    }
    if (path.empty() || args.empty()) return args;
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot read config file " + path);
    std::vector<std::string> injected;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        injected.push_back("--" + key);
        injected.push_back(value);
    }
    args.insert(args.begin() + 1, injected.begin(), injected.end());
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"boundary Ising magnetization from the Painleve-III representation"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    // profile
    auto* profile = app.add_subcommand("profile", "magnetization profile sigma(t, lambda)");
    CommonOpts pc;
    double lambda = 0.0, t_min = 0.01, t_max = 10.0, t0 = 12.0;
    int points = 200;
    std::string grid_kind = "log", branch = "stable";
    profile->add_option("--lambda", lambda, "boundary coupling 4 pi h^2 / m")
        ->check(CLI::NonNegativeNumber);
    profile->add_option("--branch", branch, "solution branch")
        ->check(CLI::IsMember({"stable", "metastable", "highT"}));
    profile->add_option("--t-min", t_min, "grid start");
    profile->add_option("--t-max", t_max, "grid end");
    profile->add_option("--points", points, "grid size")->check(CLI::Range(2, 2000000));
    profile->add_option("--grid", grid_kind, "grid spacing")
        ->check(CLI::IsMember({"log", "linear"}));
    profile->add_option("--t0", t0, "seeding radius for the backward solve");
    add_common(profile, pc);

    // phi
    auto* phi = app.add_subcommand("phi", "tabulate the Painleve transcendent phi(r)");
    CommonOpts hc;
    double phi_r = -1.0;
    phi->add_option("--r", phi_r, "evaluate at a single radius instead of the full table");
    add_common(phi, hc);

    // ff
    auto* ff = app.add_subcommand("ff", "form-factor expansion terms");
    CommonOpts fc;
    double ff_t = 2.0, ff_lambda = 1.0;
    int kmax = 3, nodes = 64;
    ff->add_option("--t", ff_t, "dimensionless distance")->check(CLI::PositiveNumber);
    ff->add_option("--lambda", ff_lambda, "boundary coupling")->check(CLI::NonNegativeNumber);
    ff->add_option("--kmax", kmax, "truncation order")->check(CLI::Range(1, 4));
    ff->add_option("--nodes", nodes, "quadrature order per dimension")
        ->check(CLI::Range(2, 256));
    add_common(ff, fc);

    // verify
    auto* verify = app.add_subcommand("verify", "run the verification suite");
    bool quick = false;
    verify->add_flag("--quick", quick, "skip the K=3 oracle comparison");

    for (auto* cmd : {profile, phi, ff}) {
        cmd->add_option("--config", "flat key=value config file (defaults < config < flags)");
    }

    try {
        auto args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << app.help() << "\n";
        return 2;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        if (profile->parsed()) {
            if (!(t_min > 0.0) || !(t_min < t_max)) {
                std::cerr << "bimag: need 0 < --t-min < --t-max\n";
                return 2;
            }
            if (branch == "metastable" && !(lambda > 0.0 && lambda < 1.0)) {
                std::cerr << "bimag: metastable branch requires 0 < --lambda < 1\n";
                return 2;
            }
            if (t_max > pc.r_max) {
                std::cerr << "bimag: --t-max must not exceed --r-max\n";
                return 2;
            }
            auto cfg = solver_config(pc);
            cfg.t_min = std::min(cfg.t_min, t_min);
            auto corr = std::make_shared<const correlators::Correlators>(
                std::make_shared<painleve::PainleveTable>(painleve::solve_phi(cfg)));
            auto ts = make_grid(t_min, t_max, points, grid_kind);
            boundary::USolverOptions opt{};
            opt.t0 = std::max(t0, t_max);
            opt.rel_tol = std::min(1e-12, pc.tol);

            boundary::MagnetizationProfile prof;
            if (branch == "metastable") {
                prof = boundary::solve_metastable(corr, lambda, ts, opt);
            } else if (branch == "highT") {
                prof = boundary::highT_profile(corr, ts);
            } else {
                prof = boundary::solve_u(corr, lambda, ts, opt);
            }
            const double s0m = specfun::sigma0(pc.mass);
            std::vector<std::vector<double>> rows(ts.size());
            for (std::size_t i = 0; i < ts.size(); ++i) {
                rows[i] = {prof.ts[i], prof.u[i], prof.sigma_ratio[i],
                           prof.sigma_ratio[i] * s0m};
            }
            std::vector<std::pair<std::string, std::string>> manifest = {
                {"subcommand", "profile"},
                {"lambda", num(lambda)},
                {"branch", branch},
                {"t_min", num(t_min)},
                {"t_max", num(t_max)},
                {"points", std::to_string(points)},
                {"grid", grid_kind},
                {"r_max", num(pc.r_max)},
                {"t0", num(opt.t0)},
                {"tol", num(pc.tol)},
                {"mass", num(pc.mass)},
                {"seed", prof.meta.seed_method},
            };
            const int rc = write_payload(pc, manifest, {"t", "u", "sigma_ratio", "sigma_abs"},
                                         rows);
            std::fprintf(stderr, "bimag profile: %zu points in %.2f s\n", ts.size(),
                         std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                             .count());
            return rc;
        }

        if (phi->parsed()) {
            auto table = painleve::solve_phi(solver_config(hc));
            std::vector<std::vector<double>> rows;
            if (phi_r > 0.0) {
                const auto p = table.eval(phi_r);
                rows.push_back({phi_r, p.phi, p.dphi});
            } else {
                for (std::size_t i = 0; i < table.knots().size(); ++i) {
                    rows.push_back({table.knots()[i], table.values()[i], table.derivs()[i]});
                }
            }
            std::vector<std::pair<std::string, std::string>> manifest = {
                {"subcommand", "phi"},
                {"r_max", num(hc.r_max)},
                {"tol", num(hc.tol)},
            };
            return write_payload(hc, manifest, {"r", "phi", "dphi"}, rows);
        }

        if (ff->parsed()) {
            const auto est = formfactor::ff_magnetization(ff_t, ff_lambda, kmax, nodes);
            for (int k = 1; k <= est.K; ++k) {
                std::printf("f_%d = %s\n", k, num(est.terms[k - 1]).c_str());
            }
            std::printf("value = %s\n", num(est.value).c_str());
            std::printf("trunc_bound = %s\n", num(est.trunc_bound).c_str());
            if (est.warning) {
                std::printf("warning: series convergence not assured (t < 0.5 or bound > 1e-3)\n");
            }
            if (!fc.output.empty()) {
                std::vector<std::vector<double>> rows;
                for (int k = 1; k <= est.K; ++k) {
                    rows.push_back({static_cast<double>(k), est.terms[k - 1]});
                }
                std::vector<std::pair<std::string, std::string>> manifest = {
                    {"subcommand", "ff"},
                    {"t", num(ff_t)},
                    {"lambda", num(ff_lambda)},
                    {"kmax", std::to_string(kmax)},
                    {"nodes", std::to_string(nodes)},
                    {"value", num(est.value)},
                    {"trunc_bound", num(est.trunc_bound)},
                    {"warning", est.warning ? "1" : "0"},
                };
                return write_payload(fc, manifest, {"k", "f_k"}, rows);
            }
            return 0;
        }

        if (verify->parsed()) {
            const auto report = bim::verify::run({quick});
            std::fputs(bim::verify::render(report).c_str(), stdout);
            std::printf("%s\n", report.all_pass ? "all criteria passed" : "criteria failed");
            std::fprintf(stderr, "bimag verify: %.1f s\n", report.seconds);
            return report.all_pass ? 0 : 1;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "bimag: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "bimag: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "bimag: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "bimag: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
