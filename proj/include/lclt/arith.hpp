#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "lclt/errors.hpp"

namespace lclt {

class DirichletCharacter;

inline constexpr uint64_t kDefaultSieveCapacity = 100'000'000ull;

/// Ascending primes up to `limit` with cached natural logs.  Immutable after
/// construction; shareable across threads.
struct PrimeTable {
    uint64_t limit = 0;
    std::vector<uint64_t> primes;
    std::vector<double> log_p;

    size_t count() const { return primes.size(); }

    // Index of the first prime > x (same convention as std::upper_bound).
    size_t upper_index(double x) const;
    // Index of the first prime > x strictly, starting the (lo, hi] window.
    size_t lower_index(double x) const { return upper_index(x); }
};

// Segmented Eratosthenes.  limit < 2 is an empty-domain error; limits above
// `capacity` are refused rather than silently truncated.
PrimeTable sieve_primes(uint64_t limit, uint64_t capacity = kDefaultSieveCapacity);

struct Factor {
    uint64_t p;
    int k;
};

// Trial division by the table's primes.  Requires table.limit^2 >= n (so the
// cofactor left after trial division is provably prime); otherwise throws
// CapacityError instead of returning a wrong factorization.
std::vector<Factor> factorize(uint64_t n, const PrimeTable& table);

int mobius(uint64_t n, const PrimeTable& table);
double von_mangoldt(uint64_t n, const PrimeTable& table);

// Number of prime divisors p of n with lo < p <= hi, counted with multiplicity.
int count_prime_factors_in_range(uint64_t n, double lo, double hi, const PrimeTable& table);

// Omega(n): all prime divisors with multiplicity.
int big_omega(uint64_t n, const PrimeTable& table);

// Sum_{p <= z} chi(p) p^{-i lambda} / p^sigma, Kahan-compensated, ascending p.
std::complex<double> prime_sum(const DirichletCharacter& chi, double lambda, double sigma,
                               double z, const PrimeTable& table);

// Kahan-compensated accumulator; accumulation order is the call order.
struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

}  // namespace lclt
