#pragma once

#include <vector>

namespace bim::formfactor {

struct FormFactorEstimate {
    double t = 0.0;
    double lambda = 0.0;
    int K = 0;                  // truncation order (max k included)
    double value = 0.0;         // sigma_FF / sigma0 = exp(sum f_k / k)
    std::vector<double> terms;  // f_1 .. f_K
    double trunc_bound = 0.0;   // geometric extrapolation of the omitted tail
    int nodes = 0;              // Gauss-Legendre order per dimension
    bool warning = false;       // t below the convergence guard or bound > 1e-3
};

// k-fold cyclic integral f_k evaluated on a tensor-product Gauss-Legendre grid
// over [0, U_cut], U_cut = arccosh(1 + 40/t). The cyclic closure u_{k+1} = u_1
// turns the sum into the trace of the k-th power of one n x n kernel matrix.
// Supported orders k = 1..4.
double ff_term(int k, double t, double lambda, int nodes = 64);

// d f_k / d t on the same grid (exact derivative of the discretized sum).
double ff_term_dt(int k, double t, double lambda, int nodes = 64);

FormFactorEstimate ff_magnetization(double t, double lambda, int K, int nodes = 64);

}  // namespace bim::formfactor
