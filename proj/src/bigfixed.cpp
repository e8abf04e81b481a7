#include "lclt/bigfixed.hpp"

#include <quadmath.h>

#include <cmath>
#include <stdexcept>

#include "lclt/errors.hpp"

namespace lclt {

namespace {
using u128 = unsigned __int128;
constexpr int kLimbs = 9;
constexpr int kFracLimbs = 8;
}  // namespace

Fixed Fixed::from_u64(uint64_t v) {
    Fixed f;
    f.w[kFracLimbs] = v;
    return f;
}

Fixed Fixed::from_double(double v) {
    if (!(v >= 0) || v >= 0x1p63) throw std::invalid_argument("Fixed::from_double: out of range");
    Fixed f;
    if (v == 0) return f;
    int e;
    double frac = std::frexp(v, &e);                       // v = frac * 2^e, frac in [0.5,1)
    uint64_t mant = static_cast<uint64_t>(frac * 0x1p53);  // 53-bit integer
    int shift = e - 53;                                    // v = mant * 2^shift
    int bit = shift + 512;                                 // position of mant's LSB
    for (int b = 0; b < 64; ++b) {
        if (!(mant & (1ull << b))) continue;
        int pos = bit + b;
        if (pos < 0 || pos >= 64 * kLimbs) continue;
        f.w[pos / 64] |= 1ull << (pos % 64);
    }
    return f;
}

Fixed Fixed::from_ratio(uint64_t a, uint64_t b) {
    if (b == 0) throw std::invalid_argument("Fixed::from_ratio: zero denominator");
    Fixed f;
    f.w[kFracLimbs] = a / b;
    uint64_t r = a % b;
    for (int i = kFracLimbs - 1; i >= 0; --i) {
        u128 num = (u128(r) << 64);
        f.w[i] = static_cast<uint64_t>(num / b);
        r = static_cast<uint64_t>(num % b);
    }
    return f;
}

Fixed Fixed::add(const Fixed& o) const {
    Fixed f;
    u128 carry = 0;
    for (int i = 0; i < kLimbs; ++i) {
        u128 s = u128(w[i]) + o.w[i] + carry;
        f.w[i] = static_cast<uint64_t>(s);
        carry = s >> 64;
    }
    return f;
}

Fixed Fixed::sub(const Fixed& o) const {
    Fixed f;
    u128 borrow = 0;
    for (int i = 0; i < kLimbs; ++i) {
        u128 d = u128(w[i]) - o.w[i] - borrow;
        f.w[i] = static_cast<uint64_t>(d);
        borrow = (d >> 64) & 1;
    }
    return f;
}

Fixed Fixed::mul(const Fixed& o) const {
    // Schoolbook product of two 9-limb integers, keeping limbs 8..16 of the
    // 18-limb result (the 2^-512 scale window).
    uint64_t z[2 * kLimbs] = {};
    for (int i = 0; i < kLimbs; ++i) {
        if (w[i] == 0) continue;
        u128 carry = 0;
        for (int j = 0; j < kLimbs; ++j) {
            u128 cur = u128(w[i]) * o.w[j] + z[i + j] + carry;
            z[i + j] = static_cast<uint64_t>(cur);
            carry = cur >> 64;
        }
        int k = i + kLimbs;
        while (carry) {
            u128 cur = u128(z[k]) + carry;
            z[k] = static_cast<uint64_t>(cur);
            carry = cur >> 64;
            ++k;
        }
    }
    Fixed f;
    for (int i = 0; i < kLimbs; ++i) f.w[i] = z[i + kFracLimbs];
    if (z[2 * kLimbs - 1] != 0) throw std::overflow_error("Fixed::mul: integer overflow");
    return f;
}

Fixed Fixed::mul_u64(uint64_t v) const {
    Fixed f;
    u128 carry = 0;
    for (int i = 0; i < kLimbs; ++i) {
        u128 cur = u128(w[i]) * v + carry;
        f.w[i] = static_cast<uint64_t>(cur);
        carry = cur >> 64;
    }
    if (carry) throw std::overflow_error("Fixed::mul_u64: integer overflow");
    return f;
}

Fixed Fixed::div_u64(uint64_t v) const {
    if (v == 0) throw std::invalid_argument("Fixed::div_u64: zero divisor");
    Fixed f;
    uint64_t r = 0;
    for (int i = kLimbs - 1; i >= 0; --i) {
        u128 num = (u128(r) << 64) | w[i];
        f.w[i] = static_cast<uint64_t>(num / v);
        r = static_cast<uint64_t>(num % v);
    }
    return f;
}

int Fixed::cmp(const Fixed& o) const {
    for (int i = kLimbs - 1; i >= 0; --i) {
        if (w[i] != o.w[i]) return w[i] < o.w[i] ? -1 : 1;
    }
    return 0;
}

bool Fixed::is_zero() const {
    for (auto v : w)
        if (v) return false;
    return true;
}

double Fixed::to_double() const {
    long double acc = 0.0L;
    for (int i = kLimbs - 1; i >= 0; --i)
        acc += std::ldexp(static_cast<long double>(w[i]), 64 * (i - kFracLimbs));
    return static_cast<double>(acc);
}

Fixed Fixed::recip() const {
    if (is_zero()) throw std::invalid_argument("Fixed::recip: zero");
    // Newton iteration r <- r(2 - x r), seeded from a double estimate.
    Fixed r = Fixed::from_double(1.0 / to_double());
    Fixed two = Fixed::from_u64(2);
    for (int it = 0; it < 8; ++it) {
        Fixed xr = mul(r);
        Fixed corr = two.sub(xr);
        r = r.mul(corr);
    }
    return r;
}

namespace {

// atan(1/n) = sum (-1)^k / ((2k+1) n^{2k+1}) with exact small divisions.
Fixed atan_inv(uint64_t n) {
    Fixed term = Fixed::from_ratio(1, n);
    Fixed sum = term;
    uint64_t n2 = n * n;
    for (uint64_t k = 1;; ++k) {
        term = term.div_u64(n2);
        if (term.is_zero()) break;
        Fixed t = term.div_u64(2 * k + 1);
        sum = (k % 2 == 1) ? sum.sub(t) : sum.add(t);
        if (t.is_zero()) break;
    }
    return sum;
}

// atanh(a/b) = sum z^{2k+1}/(2k+1) for z = a/b < 1/2.
Fixed atanh_ratio(uint64_t a, uint64_t b) {
    Fixed z = Fixed::from_ratio(a, b);
    Fixed zz = z.mul(z);
    Fixed pw = z;
    Fixed sum = z;
    for (uint64_t k = 1;; ++k) {
        pw = pw.mul(zz);
        if (pw.is_zero()) break;
        sum = sum.add(pw.div_u64(2 * k + 1));
    }
    return sum;
}

Fixed compute_two_pi() {
    // Machin: pi = 16 atan(1/5) - 4 atan(1/239).
    Fixed pi = atan_inv(5).mul_u64(16).sub(atan_inv(239).mul_u64(4));
    return pi.mul_u64(2);
}

}  // namespace

const Fixed& fixed_two_pi() {
    static const Fixed v = compute_two_pi();
    return v;
}

const Fixed& fixed_inv_two_pi() {
    static const Fixed v = fixed_two_pi().recip();
    return v;
}

const Fixed& fixed_ln2() {
    static const Fixed v = atanh_ratio(1, 3).mul_u64(2);
    return v;
}

Fixed fixed_ln(uint64_t n) {
    if (n < 2) throw std::invalid_argument("fixed_ln: n must be >= 2");
    int e = 63;
    while (!(n >> e)) --e;  // 2^e <= n < 2^{e+1}
    uint64_t pe = 1ull << e;
    Fixed res = fixed_ln2().mul_u64(static_cast<uint64_t>(e));
    if (n != pe) {
        // ln(n/2^e) = 2 atanh((n - 2^e)/(n + 2^e))
        res = res.add(atanh_ratio(n - pe, n + pe).mul_u64(2));
    }
    return res;
}

Height Height::from_double(double v) {
    if (!(v >= 0) || !std::isfinite(v)) throw std::invalid_argument("Height::from_double: need finite v >= 0");
    Height h;
    if (v == 0) return h;
    int e;
    double frac = std::frexp(v, &e);
    uint64_t mant = static_cast<uint64_t>(frac * 0x1p53);
    h.zero = false;
    h.m = {0, 0, 0, mant};
    h.e = e - 53 - 192;
    // normalize: shift so bit 255 is set
    int lead = 63;
    while (!(mant >> lead)) --lead;
    int shift = 63 - lead;
    if (shift) {
        h.m[3] <<= shift;
        h.e -= shift;
    }
    return h;
}

Height Height::from_double_times_fraction(double T, uint64_t k) {
    Height h;
    if (T == 0 || k == 0) return h;
    if (!(T > 0) || !std::isfinite(T)) throw std::invalid_argument("Height: need finite T > 0");
    int e;
    double frac = std::frexp(T, &e);
    uint64_t mant = static_cast<uint64_t>(frac * 0x1p53);
    u128 prod = u128(mant) * k;  // exact, <= 117 bits
    h.zero = false;
    h.m = {static_cast<uint64_t>(prod), static_cast<uint64_t>(prod >> 64), 0, 0};
    h.e = e - 53 - 64;
    // normalize left so top bit of m[3] is set
    while (!(h.m[3] >> 63)) {
        uint64_t carry = 0;
        for (int i = 0; i < 4; ++i) {
            uint64_t nc = h.m[i] >> 63;
            h.m[i] = (h.m[i] << 1) | carry;
            carry = nc;
        }
        h.e -= 1;
    }
    return h;
}

Height Height::add(const Height& o) const {
    if (zero) return o;
    if (o.zero) return *this;
    // Align to the larger lsb exponent, truncating the smaller value's low bits.
    const Height* a = this;
    const Height* b = &o;
    if (a->e < b->e) std::swap(a, b);
    int shift = a->e - b->e;  // >= 0; shift b right by `shift`
    std::array<uint64_t, 4> bm{};
    if (shift < 256) {
        int ls = shift / 64, bs = shift % 64;
        for (int i = 0; i < 4; ++i) {
            uint64_t lo = (i + ls < 4) ? (b->m[i + ls] >> bs) : 0;
            uint64_t hi = (bs && i + ls + 1 < 4) ? (b->m[i + ls + 1] << (64 - bs)) : 0;
            bm[i] = lo | hi;
        }
    }
    Height r;
    r.zero = false;
    r.e = a->e;
    u128 carry = 0;
    for (int i = 0; i < 4; ++i) {
        u128 s = u128(a->m[i]) + bm[i] + carry;
        r.m[i] = static_cast<uint64_t>(s);
        carry = s >> 64;
    }
    if (carry) {  // shift right one bit, keep 256-bit mantissa
        uint64_t c = 1;
        for (int i = 3; i >= 0; --i) {
            uint64_t nc = r.m[i] & 1;
            r.m[i] = (r.m[i] >> 1) | (c << 63);
            c = nc;
        }
        r.e += 1;
    }
    return r;
}

Height Height::sub(const Height& o) const {
    if (o.zero) return *this;
    if (zero) throw std::invalid_argument("Height::sub: negative result");
    // Align both mantissas to the larger lsb exponent, subtract, renormalize.
    int et = std::max(e, o.e);
    auto shifted = [&](const Height& h) {
        std::array<uint64_t, 4> m{};
        int shift = et - h.e;
        if (shift < 256) {
            int ls = shift / 64, bs = shift % 64;
            for (int i = 0; i < 4; ++i) {
                uint64_t lo = (i + ls < 4) ? (h.m[i + ls] >> bs) : 0;
                uint64_t hi = (bs && i + ls + 1 < 4) ? (h.m[i + ls + 1] << (64 - bs)) : 0;
                m[i] = lo | hi;
            }
        }
        return m;
    };
    auto am = shifted(*this), bm = shifted(o);
    u128 borrow = 0;
    Height r;
    r.e = et;
    for (int i = 0; i < 4; ++i) {
        u128 d = u128(am[i]) - bm[i] - borrow;
        r.m[i] = static_cast<uint64_t>(d);
        borrow = (d >> 64) & 1;
    }
    if (borrow) throw std::invalid_argument("Height::sub: negative result");
    if (r.m[0] == 0 && r.m[1] == 0 && r.m[2] == 0 && r.m[3] == 0) return Height{};
    r.zero = false;
    while (!(r.m[3] >> 63)) {
        uint64_t carry = 0;
        for (int i = 0; i < 4; ++i) {
            uint64_t nc = r.m[i] >> 63;
            r.m[i] = (r.m[i] << 1) | carry;
            carry = nc;
        }
        r.e -= 1;
    }
    return r;
}

Height Height::add_signed_double(double v) const {
    if (v >= 0) return add(from_double(v));
    return sub(from_double(-v));
}

double Height::to_double() const {
    if (zero) return 0.0;
    long double acc = 0.0L;
    for (int i = 3; i >= 0; --i) acc = acc + std::ldexp(static_cast<long double>(m[i]), e + 64 * i);
    return static_cast<double>(acc);
}

namespace {

// 64 bits of the 13-limb product starting at bit `pos` (LSB order), zero
// outside the array.
uint64_t extract_bits(const uint64_t* z, int nlimbs, int pos) {
    if (pos <= -64 || pos >= 64 * nlimbs) return 0;
    if (pos < 0) {
        return z[0] << (-pos);
    }
    int li = pos / 64, bs = pos % 64;
    uint64_t lo = z[li] >> bs;
    uint64_t hi = (bs && li + 1 < nlimbs) ? (z[li + 1] << (64 - bs)) : 0;
    return lo | hi;
}

}  // namespace

long double reduce_phase_fixed(const Height& t, const Fixed& q) {
    if (t.zero) return 0.0L;
    // Value = (M x Q) * 2^{e - 512}; M is 4 limbs, Q is 9 limbs.  The 512-bit
    // truncation of q costs t * 2^-512 in the phase, so heights beyond
    // ~2^445 (far above the 1e60 design range) cannot meet the 2^-60 budget.
    if (t.e > 190) throw PreconditionError("reduce_phase: height exceeds precision budget");
    uint64_t z[13] = {};
    for (int i = 0; i < 4; ++i) {
        if (t.m[i] == 0) continue;
        u128 carry = 0;
        for (int j = 0; j < 9; ++j) {
            u128 cur = u128(t.m[i]) * q.w[j] + z[i + j] + carry;
            z[i + j] = static_cast<uint64_t>(cur);
            carry = cur >> 64;
        }
        int k = i + 9;
        while (carry && k < 13) {
            u128 cur = u128(z[k]) + carry;
            z[k] = static_cast<uint64_t>(cur);
            carry = cur >> 64;
            ++k;
        }
    }
    // Fractional bits of the value sit at product-bit index 511 - e and below.
    int lo_index = 384 - t.e;  // start of the 128-bit fraction window
    uint64_t y_lo = extract_bits(z, 13, lo_index);
    uint64_t y_hi = extract_bits(z, 13, lo_index + 64);
    __float128 y = (static_cast<__float128>(y_hi) +
                    static_cast<__float128>(y_lo) * static_cast<__float128>(0x1p-64)) *
                   static_cast<__float128>(0x1p-64);
    __float128 theta = y * (2 * M_PIq);
    return static_cast<long double>(theta);
}

long double reduce_phase(const Height& t, uint64_t p) {
    if (p < 2) throw std::invalid_argument("reduce_phase: p must be >= 2");
    Fixed q = fixed_ln(p).mul(fixed_inv_two_pi());
    return reduce_phase_fixed(t, q);
}

PhaseReducer::PhaseReducer(std::vector<uint64_t> ns) : ns_(std::move(ns)) {
    q_.reserve(ns_.size());
    const Fixed& inv2pi = fixed_inv_two_pi();
    for (uint64_t n : ns_) q_.push_back(fixed_ln(n).mul(inv2pi));
}

PhaseReducer::PhaseReducer(const PrimeTable& table, size_t first, size_t end)
    : PhaseReducer(std::vector<uint64_t>(table.primes.begin() + first, table.primes.begin() + end)) {}

}  // namespace lclt
