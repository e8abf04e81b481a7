#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lclt/arith.hpp"

namespace lclt {

// Non-negative fixed-point number with 512 fractional bits and a 64-bit
// integer part: value = sum_i w[i] * 2^{64*(i-8)}, w little-endian.
// Enough headroom for ln p, 2 pi and their products at full precision.
struct Fixed {
    std::array<uint64_t, 9> w{};

    static Fixed from_u64(uint64_t v);
    static Fixed from_double(double v);        // v in [0, 2^63)
    static Fixed from_ratio(uint64_t a, uint64_t b);  // exact a/b to 512 bits

    Fixed add(const Fixed& o) const;
    Fixed sub(const Fixed& o) const;           // requires *this >= o
    Fixed mul(const Fixed& o) const;           // truncating at 2^-512
    Fixed mul_u64(uint64_t v) const;
    Fixed div_u64(uint64_t v) const;
    Fixed recip() const;                       // 1/x, x > 0

    int cmp(const Fixed& o) const;
    bool is_zero() const;
    double to_double() const;
};

// Cached 512-bit constants (Machin series for pi, atanh series for ln 2).
const Fixed& fixed_two_pi();
const Fixed& fixed_inv_two_pi();
const Fixed& fixed_ln2();

// ln n for integer n >= 2 to 512 fractional bits.
Fixed fixed_ln(uint64_t n);

// Positive real with a 256-bit mantissa: value = m * 2^e with the top bit of
// m[3] set (unless zero).  Heights t in [T, 2T] built from a double T and a
// 64-bit uniform fraction are represented exactly.
struct Height {
    std::array<uint64_t, 4> m{};
    int e = 0;
    bool zero = true;

    static Height from_double(double v);
    // Exact T * k * 2^-64 for double T >= 0 and 64-bit k.
    static Height from_double_times_fraction(double T, uint64_t k);

    Height add(const Height& o) const;  // rounds to 256 bits (truncation)
    Height sub(const Height& o) const;  // requires *this >= o
    Height add_double(double v) const { return add(from_double(v)); }
    // t + v for signed v with |v| < value; keeps the 256-bit precision.
    Height add_signed_double(double v) const;
    double to_double() const;
};

// t * ln(p) mod 2pi in [0, 2pi), absolute error below 2^-60 for t up to
// ~1e60.  Throws PreconditionError when t is too large for the fixed
// 512-bit budget (never wraps silently).
long double reduce_phase(const Height& t, uint64_t p);

// Same reduction against a caller-supplied multiplier q = ln(x)/2pi.
long double reduce_phase_fixed(const Height& t, const Fixed& ln_over_2pi);

// Bulk reducer with precomputed ln(n)/2pi per entry.
class PhaseReducer {
  public:
    explicit PhaseReducer(std::vector<uint64_t> ns);
    PhaseReducer(const PrimeTable& table, size_t first, size_t end);

    size_t size() const { return ns_.size(); }
    uint64_t entry(size_t i) const { return ns_[i]; }
    long double phase(const Height& t, size_t i) const { return reduce_phase_fixed(t, q_[i]); }

  private:
    std::vector<uint64_t> ns_;
    std::vector<Fixed> q_;
};

}  // namespace lclt
