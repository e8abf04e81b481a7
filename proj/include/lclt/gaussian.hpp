#pragma once

#include <cstdint>
#include <vector>

#include "lclt/batch.hpp"
#include "lclt/matrix.hpp"

namespace lclt {

/// Centered multivariate normal specified by a PD covariance and its
/// Cholesky factor.  Means are identically zero.
struct GaussianSpec {
    int dim = 0;
    Matrix covariance;
    Matrix cholesky_factor;  // lower triangular

    static GaussianSpec from_covariance(const Matrix& cov);  // throws on non-PD
};

// n i.i.d. draws of L g with g standard normal; the stream is keyed by
// (seed, row), so batches are identical for any worker split.
SampleBatch sample_mvn(const GaussianSpec& spec, size_t n, uint64_t seed);

// E[(u . Z)^{2n}] = (2n)! / (n! 2^n) (u^T K u)^n, exact.
double mvn_even_moment(const std::vector<double>& u, const GaussianSpec& spec, int n);
// Odd moments vanish identically.
inline double mvn_odd_moment() { return 0.0; }

// sqrt(2/pi) e^{-r^2/2} / r; upper bound on P(|N(0,1)| > r) for r >= 1.
double gaussian_tail(double r);

struct NeumannResult {
    Matrix inverse_approx;
    double residual_bound;  // geometric tail bound on entries of the inverse
};

// (C + E)^{-1} by the truncated Neumann series (I + C^{-1}E)^{-1} C^{-1}.
// Admissibility: N^2 * maxentry(C^{-1}) * maxentry(E) < 1; rejected otherwise.
NeumannResult neumann_inverse(const Matrix& C, const Matrix& E_tilde, int terms);

// det(I + C^{-1} E), with the same admissibility gate.
double det_ratio(const Matrix& C, const Matrix& E_tilde);

struct DensityDiffResult {
    double numeric_integral;    // integral over the box of |phi_{C+E} - phi_C|
    double paper_bound_shape;   // computable first-order bound, O(maxentry E)
    double mc_stderr = 0.0;     // only for the MC fallback path
    bool used_mc = false;
};

// L1 distance between the two centered Gaussian densities over the box
// [-half_width_sigmas * s, ...]^N with s = sqrt(max diag).  Tensor-grid
// trapezoid for N <= 3; stratified MC with reported standard error above.
DensityDiffResult density_diff(const Matrix& C, const Matrix& E_tilde, double f_sup = 1.0,
                               double half_width_sigmas = 8.0, int nodes_per_axis = 201,
                               uint64_t mc_seed = 0x1005);

}  // namespace lclt
