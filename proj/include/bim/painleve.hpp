#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bim::painleve {

struct SolverConfig {
    double r_max = 14.0;   // asymptotic matching radius
    double t_min = 1e-3;   // smallest supported argument
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    // knot policy: log-spaced below r = 1, linear above
    int knots_per_decade = 600;
    double linear_step = 0.005;

    void validate() const;  // throws std::invalid_argument on a bad config
};

struct SolverError : std::runtime_error {
    double radius;
    SolverError(const std::string& what, double r) : std::runtime_error(what), radius(r) {}
};

// phi'' from the radial sinh-Gordon equation, exact on the solution manifold.
inline double ode_d2phi(double r, double phi, double dphi) {
    return 0.5 * std::sinh(2.0 * phi) - dphi / r;
}

// Small-r closed form -ln(-(1/2) r Omega), Omega = ln(e^gamma r / 8).
// Valid guard: 0 < r < 0.1.
double small_r_reference(double r);

class PainleveTable {
public:
    struct Point {
        double phi;
        double dphi;
        double d2phi;
    };

    // C1 evaluation anywhere in [t_min, r_max]; d2phi comes from the ODE.
    Point eval(double r) const;

    // Painleve III transcendent eta(x) = exp(-phi(2x)).
    double eta(double x) const;

    double t_min() const { return knots_.front(); }
    double r_max() const { return knots_.back(); }
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return phi_; }
    const std::vector<double>& derivs() const { return dphi_; }
    const SolverConfig& config() const { return config_; }

    // Evaluation restricted to knot interval i (r in [knots[i], knots[i+1]]);
    // lets integrators walking the knot partition skip the binary search.
    Point eval_in_interval(std::size_t i, double r) const;

private:
    friend PainleveTable solve_phi(const SolverConfig&);

    std::size_t locate(double r) const;
    void check_invariants() const;

    std::vector<double> knots_;  // ascending
    std::vector<double> phi_;
    std::vector<double> dphi_;
    SolverConfig config_;
};

// Solve the connection problem: integrate inward from r_max with the
// exponential-tail initial data phi = (2/pi) K0, phi' = -(2/pi) K1.
PainleveTable solve_phi(const SolverConfig& config = {});

}  // namespace bim::painleve
