#pragma once

#include <complex>
#include <vector>

#include "lclt/arith.hpp"
#include "lclt/characters.hpp"
#include "lclt/covariance.hpp"
#include "lclt/params.hpp"

namespace lclt {

/// One quadrature-vs-formula comparison of a joint moment of the twisted
/// prime polynomial P_{a,0}(sigma0 + it, Y).
struct MomentReport {
    int k = 0, l = 0;
    std::complex<double> quad_value;  // (1/T) int_T^{2T} P^k conj(P)^l dt
    double formula_value = 0.0;       // diagonal main term (k = l) or off-diag envelope
    double error_budget = 0.0;        // Richardson + off-diagonal allowance
    long nodes = 0;
    double T = 0, Y = 0;
    int N = 0;
};

// Composite-trapezoid quadrature of (1/T) int_T^{2T} P^k conj(P)^l dt where
// P(t) = sum_{p<=Y} (sum_j a_j chi_j(p) p^{-i alpha_j}) / p^{sigma0 + it}.
// Refuses with the required node count when the spacing cannot resolve the
// fastest phase (spacing <= pi / (4 ln Y)).
MomentReport quad_moment(const std::vector<double>& a, const ShiftConfig& shifts,
                         const std::vector<DirichletCharacter>& chars, const ApproxParams& params,
                         int k, int l, long nodes, const PrimeTable& table);

// Diagonal moment sum_n b_k(n)^2 |Psi_k(n)|^2 / n^{2 sigma0} by direct
// enumeration of multisets of <= k primes <= Y.  Enumeration budget:
// (#primes)^k <= 1e8.  The square-free part is cross-checked internally
// against the k! e_k product expansion (Newton identities) to 1e-10.
double exact_diagonal_moment(const std::vector<double>& a, const ShiftConfig& shifts,
                             const std::vector<DirichletCharacter>& chars,
                             const ApproxParams& params, int k, const PrimeTable& table);

// moment_2k / threshold^{2k}.
double chebyshev_tail(double moment_2k, double threshold, int k);

// sqrt(1/pi) sqrt(loglog T)/r exp(-r^2/loglog T) + 1/T.
double p1_exp_tail(double r, double T);

struct ExpPartialCheck {
    double lhs = 0.0;  // |e^z - sum_{j<=n} z^j/j!|, extended precision
    double rhs = 0.0;  // e^{-n}
    bool ok = false;
};

// Extended-precision check of the partial-sum inequality; ok must hold
// whenever n >= 7.5 (|z| + 1).
ExpPartialCheck exp_partial_bound_check(std::complex<double> z, int n);

struct StirlingReport {
    double value = 0.0;    // n! (inf when it overflows; comparison in logs)
    double main = 0.0;     // sqrt(2 pi n) (n/e)^n
    double rel_err = 0.0;  // |n!/main - 1|
};

StirlingReport stirling_bounds(long n);

// (1/T) int_T^{2T} |1 - L_trunc(sigma0+it) M_trunc(sigma0+it)|^2 dt with the
// L-sum truncated at floor(T) and the mollifier at `cutoff`.  Desk scale
// only; checked qualitatively across scales, not against the asymptotic
// constant.
double mollifier_mean_square(const DirichletCharacter& chi, const ApproxParams& params,
                             uint64_t cutoff, long nodes, const PrimeTable& table);

}  // namespace lclt
