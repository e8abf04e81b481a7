#include <doctest.h>

#include <mpfr.h>

#include <cmath>

#include "lclt/bigfixed.hpp"
#include "lclt/rng.hpp"

using namespace lclt;

namespace {

// 768-bit MPFR oracle for t * ln(p) mod 2pi, fully independent of the
// fixed-point path.  t is reconstructed exactly as T + T * k * 2^-64.
long double oracle_phase(double T, uint64_t k, uint64_t p) {
    constexpr mpfr_prec_t kPrec = 768;
    mpfr_t t, lp, twopi, prod;
    mpfr_inits2(kPrec, t, lp, twopi, prod, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_d(t, T, MPFR_RNDN);
    mpfr_mul_ui(prod, t, 1, MPFR_RNDN);
    // t = T + T*k*2^-64
    mpfr_mul_ui(t, t, static_cast<unsigned long>(k >> 32), MPFR_RNDN);
    mpfr_mul_2si(t, t, 32, MPFR_RNDN);
    mpfr_t low;
    mpfr_init2(low, kPrec);
    mpfr_set_d(low, T, MPFR_RNDN);
    mpfr_mul_ui(low, low, static_cast<unsigned long>(k & 0xFFFFFFFFull), MPFR_RNDN);
    mpfr_add(t, t, low, MPFR_RNDN);
    mpfr_mul_2si(t, t, -64, MPFR_RNDN);
    mpfr_add(t, t, prod, MPFR_RNDN);

    mpfr_set_ui(lp, static_cast<unsigned long>(p), MPFR_RNDN);
    mpfr_log(lp, lp, MPFR_RNDN);
    mpfr_mul(prod, t, lp, MPFR_RNDN);
    mpfr_const_pi(twopi, MPFR_RNDN);
    mpfr_mul_2si(twopi, twopi, 1, MPFR_RNDN);
    mpfr_fmod(prod, prod, twopi, MPFR_RNDN);
    long double out = mpfr_get_ld(prod, MPFR_RNDN);
    mpfr_clears(t, lp, twopi, prod, low, static_cast<mpfr_ptr>(nullptr));
    return out;
}

long double circle_dist(long double a, long double b) {
    long double two_pi = 6.28318530717958647692528676655900577L;
    long double d = std::fabs(a - b);
    return std::min(d, two_pi - d);
}

}  // namespace

TEST_CASE("Fixed constants against double references") {
    CHECK(fixed_two_pi().to_double() == doctest::Approx(2.0 * M_PI).epsilon(1e-15));
    CHECK(fixed_inv_two_pi().to_double() == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-15));
    CHECK(fixed_ln2().to_double() == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    for (uint64_t n : {3ull, 7ull, 97ull, 65537ull, 99999989ull})
        CHECK(fixed_ln(n).to_double() == doctest::Approx(std::log(double(n))).epsilon(1e-14));
    // identity round trip: 2pi * (1/2pi) = 1
    Fixed one = fixed_two_pi().mul(fixed_inv_two_pi());
    CHECK(one.to_double() == doctest::Approx(1.0).epsilon(1e-30));
}

TEST_CASE("Fixed ln against a 512-bit MPFR oracle") {
    mpfr_t x;
    mpfr_init2(x, 600);
    for (uint64_t n : {2ull, 3ull, 5ull, 11ull, 104729ull, 1000003ull}) {
        mpfr_set_ui(x, static_cast<unsigned long>(n), MPFR_RNDN);
        mpfr_log(x, x, MPFR_RNDN);
        Fixed mine = fixed_ln(n);
        // compare the top 120 bits via scaled difference
        mpfr_t mine_m;
        mpfr_init2(mine_m, 600);
        mpfr_set_ui(mine_m, 0, MPFR_RNDN);
        for (int i = 8; i >= 0; --i) {
            mpfr_mul_2si(mine_m, mine_m, 64, MPFR_RNDN);
            mpfr_add_ui(mine_m, mine_m, static_cast<unsigned long>(mine.w[i]), MPFR_RNDN);
        }
        mpfr_mul_2si(mine_m, mine_m, -512, MPFR_RNDN);
        mpfr_sub(mine_m, mine_m, x, MPFR_RNDN);
        mpfr_abs(mine_m, mine_m, MPFR_RNDN);
        double err = mpfr_get_d(mine_m, MPFR_RNDN);
        CHECK(err < std::ldexp(1.0, -490));
        mpfr_clear(mine_m);
    }
    mpfr_clear(x);
}

TEST_CASE("Height arithmetic") {
    Height a = Height::from_double(1e40);
    CHECK(a.to_double() == doctest::Approx(1e40).epsilon(1e-15));
    Height b = Height::from_double_times_fraction(1e40, uint64_t(1) << 63);  // 1e40 * 0.5
    CHECK(b.to_double() == doctest::Approx(0.5e40).epsilon(1e-15));
    CHECK(a.add(b).to_double() == doctest::Approx(1.5e40).epsilon(1e-15));
    CHECK(a.sub(b).to_double() == doctest::Approx(0.5e40).epsilon(1e-15));
    CHECK(a.add_signed_double(-1e38).to_double() == doctest::Approx(0.99e40).epsilon(1e-14));
    CHECK(Height::from_double(0.0).to_double() == 0.0);
}

TEST_CASE("reduce_phase trivial examples") {
    CHECK(static_cast<double>(reduce_phase(Height::from_double(0.0), 2)) == 0.0);
    // exact period: t = 2pi/ln2 gives t ln 2 = 2pi = 0 mod 2pi
    double t = 2.0 * M_PI / std::log(2.0);
    long double th = reduce_phase(Height::from_double(t), 2);
    long double two_pi = 6.28318530717958647692528676655900577L;
    CHECK(static_cast<double>(std::min(th, two_pi - th)) == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("reduce_phase vs 768-bit oracle, heights up to 1e60") {
    CounterRng rng(2024, 0);
    auto table = sieve_primes(100000);
    int checked = 0;
    long double max_err = 0.0L;
    while (checked < 1000) {
        double exp10 = 1.0 + 59.0 * rng.next_unit();
        double T = std::pow(10.0, exp10);
        uint64_t k = rng.next_u64();
        uint64_t p = table.primes[rng.next_u64() % table.count()];
        Height t = Height::from_double(T).add(Height::from_double_times_fraction(T, k));
        long double mine = reduce_phase(t, p);
        long double want = oracle_phase(T, k, p);
        long double err = circle_dist(mine, want);
        max_err = std::max(max_err, err);
        ++checked;
    }
    CHECK(static_cast<double>(max_err) < std::ldexp(1.0, -60));
    MESSAGE("max phase error vs oracle: ", static_cast<double>(max_err));
}

TEST_CASE("reduce_phase at 1e30, p=2 against the oracle") {
    double T = 1e30;
    uint64_t k = 0x123456789ABCDEF0ull;
    Height t = Height::from_double(T).add(Height::from_double_times_fraction(T, k));
    long double mine = reduce_phase(t, 2);
    long double want = oracle_phase(T, k, 2);
    CHECK(static_cast<double>(circle_dist(mine, want)) < std::ldexp(1.0, -60));
}

TEST_CASE("reduce_phase precision budget is enforced") {
    Height big = Height::from_double(1e300);
    big.e += 200;  // push beyond any representable height budget
    CHECK_THROWS_AS(reduce_phase(big, 2), PreconditionError);
}
