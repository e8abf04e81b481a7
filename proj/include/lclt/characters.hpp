#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <vector>

#include "lclt/errors.hpp"

namespace lclt {

// Exact fraction a/b meaning the root of unity e^{2 pi i a/b}, kept reduced
// with 0 <= a < b.  Denominators divide the character order, so int64 never
// overflows at the moduli this artifact handles.
struct Rational {
    int64_t num = 0;
    int64_t den = 1;

    static Rational mod1(int64_t a, int64_t b);
    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool is_zero() const { return num == 0; }
    std::complex<double> to_complex() const;
};

/// Completely multiplicative character mod q with exact root-of-unity values.
/// chi(r) = e^{2 pi i exponent(r)} for gcd(r, q) = 1, zero otherwise.
class DirichletCharacter {
  public:
    DirichletCharacter() = default;
    DirichletCharacter(uint64_t q, std::vector<Rational> exps, std::vector<uint8_t> coprime,
                       int index);

    uint64_t modulus() const { return q_; }
    bool is_principal() const { return principal_; }
    int index() const { return index_; }

    bool is_coprime(uint64_t n) const { return coprime_[n % q_] != 0; }
    // Exact exponent of chi(n); only valid when is_coprime(n).
    const Rational& exponent(uint64_t n) const { return exps_[n % q_]; }

    std::complex<double> evaluate(uint64_t n) const {
        uint64_t r = n % q_;
        if (!coprime_[r]) return {0.0, 0.0};
        return exps_[r].to_complex();
    }
    // evaluate() for negative or arbitrary-sign integers.
    std::complex<double> evaluate_signed(int64_t n) const {
        int64_t r = n % static_cast<int64_t>(q_);
        if (r < 0) r += static_cast<int64_t>(q_);
        return evaluate(static_cast<uint64_t>(r));
    }

  private:
    uint64_t q_ = 1;
    std::vector<Rational> exps_;      // indexed by residue, junk off coprime residues
    std::vector<uint8_t> coprime_;    // indexed by residue
    bool principal_ = true;
    int index_ = 0;  // position in the canonical group ordering
};

// The full character group mod q in canonical order: characters are labeled
// by their CRT exponent tuples (one exponent per cyclic factor, factors
// ordered by ascending prime, <-1> before <5> for 2^e), listed in
// lexicographic order of those tuples.  Index 0 is always principal.
std::vector<DirichletCharacter> character_group(uint64_t q);

// Single character by (q, index) in the canonical ordering.
DirichletCharacter character_by_index(uint64_t q, int index);

// 1 iff chi_i * conj(chi_j) is principal mod lcm(q_i, q_j); symmetric.
int pair_delta(const DirichletCharacter& chi_i, const DirichletCharacter& chi_j);

uint64_t euler_phi(uint64_t q);

}  // namespace lclt
