#pragma once

#include <vector>

#include "lclt/arith.hpp"
#include "lclt/characters.hpp"
#include "lclt/matrix.hpp"
#include "lclt/params.hpp"

namespace lclt {

/// Shift classification of one pair: c from the cond-1/cond-01 dichotomy and
/// the deviation e(T) = log(1/|d|) - c loglog T, flagged when |e| exceeds the
/// delta(T) budget.
struct PairClass {
    double c = 1.0;
    double e = 0.0;
    bool violates_budget = false;
};

PairClass classify_shift_pair(double alpha_i, double alpha_j, double T, double delta_budget);

/// Shift vector at one working T together with the pairwise class table and
/// the Delta/delta budgets.
struct ShiftConfig {
    int N = 0;
    std::vector<double> alphas;
    double Delta_budget = 0.0;
    double delta_budget = 0.0;
    double epsilon = 0.5;  // in (0, 2/3)

    static ShiftConfig make(std::vector<double> alphas, double T, double Delta_budget,
                            double delta_budget, double epsilon);

    const PairClass& pair(int i, int j) const { return classes[static_cast<size_t>(i) * N + j]; }
    std::vector<PairClass> classes;  // row-major N x N, diagonal c = 1
};

// min(loglog T, log 1/|alpha_i - alpha_j|); equal shifts return loglog T.
double v_min(double T, double alpha_i, double alpha_j);

// ||a||^2 loglog T + 2 sum_{i<j} a_i a_j delta_ij V(T, alpha_i, alpha_j).
double u_quadratic(const std::vector<double>& a, const ShiftConfig& shifts,
                   const std::vector<DirichletCharacter>& chars, double T);

struct PdReport {
    bool pd = false;
    bool indeterminate = false;  // some minor within tolerance of zero
    std::vector<double> minors;
    bool cholesky_ok = false;
};

// Sylvester minors and a Cholesky attempt; the two verdicts must agree away
// from the tolerance boundary.
PdReport check_pd(const Matrix& m, double sym_tol = 1e-12);

// Target covariance: unit diagonal, delta_ij * c_ij off the diagonal.
Matrix build_K(const ShiftConfig& shifts, const std::vector<DirichletCharacter>& chars);

// Empirical covariance of the P1 block at finite T:
//   ktilde_ij = Re sum_{13<p<=Y} chi_i conj(chi_j)(p) p^{-i(a_i-a_j)} / p^{2 sigma0}
//               / sqrt(M_i M_j).
Matrix build_K_tilde(double T, const ShiftConfig& shifts,
                     const std::vector<DirichletCharacter>& chars, const ApproxParams& params,
                     const PrimeTable& table);

struct CovarianceSpec {
    Matrix K_target;
    Matrix K_empirical;
    bool pd_target = false;
    bool pd_empirical = false;
    double T = 0;
};

CovarianceSpec make_covariance_spec(double T, const ShiftConfig& shifts,
                                    const std::vector<DirichletCharacter>& chars,
                                    const ApproxParams& params, const PrimeTable& table);

/// Variance normalizer of the P1 block and the C1(T) comparison factor.
struct Normalizer {
    double M_T_chi = 0.0;  // sum_{13<p<=Y} |chi(p)|^2 / p^{2 sigma0}
    double C1 = 0.0;       // sqrt(loglog T / M)
    double kappa2 = 0.0;   // e/(e-1)
    bool M_le_loglogT = false;
    bool C1_sq_lt_kappa2 = false;  // asymptotic property; can fail at finite T
};

Normalizer normalizer(double T, const DirichletCharacter& chi, const ApproxParams& params,
                      const PrimeTable& table);

}  // namespace lclt
