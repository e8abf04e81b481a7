#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "lclt/arith.hpp"
#include "lclt/bigfixed.hpp"
#include "lclt/characters.hpp"
#include "lclt/params.hpp"

namespace lclt {

// Prime ranges of the three-way split: P0 over p <= 13, P1 over 13 < p <= Y,
// P2 over Y < p <= X, P_full their concatenation.
enum class PolyRange { P0, P1, P2, Full };

// Re sum_{p in range} chi(p) / p^{sigma + i t}, phases via reduce_phase,
// ascending p with Kahan compensation.  Full is evaluated in the identical
// order as P0, P1, P2 back to back.
double eval_prime_poly(const DirichletCharacter& chi, double sigma, const Height& t,
                       PolyRange range, const ApproxParams& params, const PrimeTable& table);
double eval_prime_poly(const DirichletCharacter& chi, std::complex<double> s, PolyRange range,
                       const ApproxParams& params, const PrimeTable& table);

// sum over prime powers n in the range of Lambda(n) chi(n) / (n^s log n)
// = sum chi(p)^k / (k p^{ks}).  Range boundaries apply to n = p^k.
std::complex<double> eval_lambda_poly(const DirichletCharacter& chi, double sigma, const Height& t,
                                      PolyRange range, const ApproxParams& params,
                                      const PrimeTable& table);
std::complex<double> eval_lambda_poly(const DirichletCharacter& chi, std::complex<double> s,
                                      PolyRange range, const ApproxParams& params,
                                      const PrimeTable& table);

// Mollifier coefficient a(n): 1 iff n has no prime factor > X, at most
// 100 loglog T prime factors <= Y and at most A logloglog T in (Y, X],
// counted with multiplicity.
int mollifier_coeff(uint64_t n, const ApproxParams& params, const PrimeTable& table);

struct MollifierValue {
    std::complex<double> value;
    double tail_bound;  // crude integral bound on the truncated support tail
    uint64_t cutoff;
};

// sum_{n <= cutoff} mu(n) a(n) chi(n) / n^s.
MollifierValue eval_mollifier(const DirichletCharacter& chi, std::complex<double> s,
                              const ApproxParams& params, uint64_t cutoff,
                              const PrimeTable& table);

// sum_{n <= cutoff} chi(n) / n^s.  The approximation-to-L(s, chi) guarantee
// holds for Re s > 1/2; the sum itself is defined for any real sigma > 0.
std::complex<double> eval_L_truncated(const DirichletCharacter& chi, std::complex<double> s,
                                      uint64_t cutoff);

// Per-run evaluator for the truncated L-series: per-n amplitude and log
// tables are built once, then each height costs one pass.  Heights here are
// doubles (the X_T/X0_T stages are restricted to T <= full-L budget).
class LTruncEvaluator {
  public:
    LTruncEvaluator(const DirichletCharacter& chi, double sigma, uint64_t cutoff);
    std::complex<double> value(double t) const;
    uint64_t cutoff() const { return cutoff_; }

  private:
    std::vector<double> amp_re_, amp_im_, log_n_;
    uint64_t cutoff_;
};

// Per-run evaluator for all prime-polynomial stages of one coordinate: one
// phase-reduction pass per height serves P0/P1/P2/P and the prime-power
// series.  Covers primes p <= X_eff and prime powers p^k <= X_eff.
class PrimePolyEvaluator {
  public:
    PrimePolyEvaluator(const DirichletCharacter& chi, const ApproxParams& params,
                       const PrimeTable& table);

    struct StageValues {
        double p0, p1, p2;            // real parts of the three prime blocks
        double p_full;                // = p0 + p1 + p2, same summation order
        std::complex<double> lambda;  // full prime-power series (script P)
    };
    StageValues eval(double sigma, const Height& t) const;

    size_t prime_count() const { return reducer_.size(); }

  private:
    const DirichletCharacter chi_;
    double Y_, X_;
    PhaseReducer reducer_;                  // primes p <= X
    std::vector<std::complex<double>> cv_;  // chi(p)
    std::vector<double> logp_;
    size_t end_p0_, end_p1_;  // index of first prime > 13, > Y
};

}  // namespace lclt
