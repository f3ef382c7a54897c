#include "bim/formfactor.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bim/quadrature.hpp"

namespace bim::formfactor {

namespace {

constexpr int kMaxOrder = 4;

struct Kernel {
    int n;
    std::vector<double> ch;  // cosh u_i
    std::vector<double> a;   // weight * (ch-1) * ratio * e^{-t ch}
};

// Per-node weight a_i. At lambda = 0 the (ch-1) factor cancels against the
// ratio denominator analytically; use the cancelled form so near-zero nodes
// cannot degrade.
Kernel build_kernel(double t, double lambda, int nodes) {
    if (!(t > 0.0)) throw std::domain_error("ff_term: t must be positive");
    if (lambda < 0.0) throw std::domain_error("ff_term: lambda must be >= 0");
    if (nodes < 2) throw std::domain_error("ff_term: nodes must be >= 2");
    const double u_cut = std::acosh(1.0 + 40.0 / t);
    const auto& rule = quad::gauss_legendre(nodes);
    Kernel k;
    k.n = nodes;
    k.ch.resize(nodes);
    k.a.resize(nodes);
    for (int i = 0; i < nodes; ++i) {
        const double u = 0.5 * u_cut * (rule.nodes[i] + 1.0);
        const double w = 0.5 * u_cut * rule.weights[i];
        const double c = std::cosh(u);
        k.ch[i] = c;
        const double e = std::exp(-t * c);
        if (lambda == 0.0) {
            k.a[i] = w * (c + 1.0) * e;
        } else {
            k.a[i] = w * (c - 1.0) * ((c + 1.0 - lambda) / (c - 1.0 + lambda)) * e;
        }
    }
    return k;
}

// trace of (A D)^k with D_ij = 1/(ch_i + ch_j), A = diag(a or a'), where the
// first factor may carry the differentiated weight a'_i = -ch_i a_i.
double trace_power(const Kernel& k, int p, bool first_dt) {
    const int n = k.n;
    auto aval = [&](int i, bool dt) { return dt ? -k.ch[i] * k.a[i] : k.a[i]; };
    if (p == 1) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += aval(i, first_dt) / (2.0 * k.ch[i]);
        return s;
    }
    // M_ij = a_i / (ch_i + ch_j); M2 = M*M
    std::vector<double> M(n * n), Md(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            M[i * n + j] = k.a[i] / (k.ch[i] + k.ch[j]);
            Md[i * n + j] = aval(i, first_dt) / (k.ch[i] + k.ch[j]);
        }
    if (p == 2) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += Md[i * n + j] * M[j * n + i];
        return s;
    }
    std::vector<double> M2(n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
            const double m = M[i * n + l];
            for (int j = 0; j < n; ++j) M2[i * n + j] += m * M[l * n + j];
        }
    if (p == 3) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += Md[i * n + j] * M2[j * n + i];
        return s;
    }
    // p == 4: tr(Md * M * M2)
    std::vector<double> MdM(n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
            const double m = Md[i * n + l];
            for (int j = 0; j < n; ++j) MdM[i * n + j] += m * M[l * n + j];
        }
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += MdM[i * n + j] * M2[j * n + i];
    return s;
}

void check_order(int k) {
    if (k < 1 || k > kMaxOrder)
        throw std::domain_error("ff_term: order k must be in 1..4 (cost grows as nodes^k)");
}

}  // namespace

double ff_term(int k, double t, double lambda, int nodes) {
    check_order(k);
    const Kernel ker = build_kernel(t, lambda, nodes);
    return -std::pow(M_PI, -k) * trace_power(ker, k, false);
}

double ff_term_dt(int k, double t, double lambda, int nodes) {
    check_order(k);
    const Kernel ker = build_kernel(t, lambda, nodes);
    // d/dt distributes over the k cyclic weights; all placements give the
    // same trace, hence the factor k.
    return -std::pow(M_PI, -k) * k * trace_power(ker, k, true);
}

FormFactorEstimate ff_magnetization(double t, double lambda, int K, int nodes) {
    if (K < 1 || K > kMaxOrder) throw std::domain_error("ff_magnetization: K must be in 1..4");
    FormFactorEstimate est;
    est.t = t;
    est.lambda = lambda;
    est.K = K;
    est.nodes = nodes;

    double series = 0.0;
    for (int k = 1; k <= K; ++k) {
        est.terms.push_back(ff_term(k, t, lambda, nodes));
        series += est.terms.back() / k;
    }
    est.value = std::exp(series);

    // truncation estimate: geometric extrapolation of |f_k|
    double rho = std::exp(-t);
    if (K >= 2 && est.terms[K - 2] != 0.0) {
        rho = std::abs(est.terms[K - 1] / est.terms[K - 2]);
    }
    const double head = std::abs(est.terms[K - 1]) / K;
    est.trunc_bound = (rho < 1.0) ? head * rho / (1.0 - rho) : head;
    if (est.trunc_bound <= 0.0) est.trunc_bound = 1e-300;  // keep strictly positive

    est.warning = (t < 0.5) || (est.trunc_bound > 1e-3) || rho >= 1.0;
    return est;
}

}  // namespace bim::formfactor
