#include <doctest.h>

#include <cmath>

#include "lclt/dirichlet_series.hpp"
#include "lclt/moments.hpp"
#include "lclt/rng.hpp"

using namespace lclt;

namespace {

struct Setup {
    PrimeTable table = sieve_primes(250000);
    std::vector<DirichletCharacter> g5 = character_group(5);
};

long required_nodes(double T, double Y, int k, int l) {
    return static_cast<long>(std::ceil(T * 4.0 * (k + l) * std::log(Y) / 3.141592653589793)) + 1;
}

}  // namespace

TEST_CASE("quad_moment: k=l=0 is exactly one") {
    Setup s;
    auto params = derive_params(1e4 * 10, 2.5, 2.2, 400, 80, 200.0, 5000.0);
    auto sc = ShiftConfig::make({0.0}, params.T, 10, 10, 0.5);
    auto rep = quad_moment({1.0}, sc, {s.g5[1]}, params, 0, 0, 1000, s.table);
    CHECK(rep.quad_value.real() == 1.0);
    CHECK(rep.quad_value.imag() == 0.0);
}

TEST_CASE("quad_moment refuses under-resolved grids with the required count") {
    Setup s;
    auto params = derive_params(1e4, 2.5, 2.2, 400, 80, 200.0, 5000.0);
    auto sc = ShiftConfig::make({0.0}, params.T, 10, 10, 0.5);
    try {
        quad_moment({1.0}, sc, {s.g5[1]}, params, 1, 1, 2000, s.table);
        FAIL("expected refusal");
    } catch (const PreconditionError& e) {
        std::string msg = e.what();
        CHECK(msg.find("need >=") != std::string::npos);
    }
}

TEST_CASE("quad_moment diagonal k=l=1 matches the direct prime sum") {
    Setup s;
    double T = 1e4;
    auto params = derive_params(T, 2.5, 2.2, 400, 80, 200.0, 5000.0);
    auto sc = ShiftConfig::make({0.0}, T, 10, 10, 0.5);
    long nodes = required_nodes(T, 200.0, 1, 1);
    auto rep = quad_moment({1.0}, sc, {s.g5[1]}, params, 1, 1, nodes, s.table);
    // independent oracle: direct prime sum
    double direct = 0.0;
    for (uint64_t p : s.table.primes) {
        if (double(p) > 200.0) break;
        if (p % 5 == 0) continue;
        direct += std::pow(double(p), -2.0 * params.sigma0);
    }
    CHECK(std::abs(rep.quad_value.real() - direct) / direct < 0.05);
    CHECK(std::abs(rep.quad_value.imag()) <= rep.error_budget);  // diagonal is real
    CHECK(rep.formula_value == doctest::Approx(direct).epsilon(1e-12));
    CHECK(std::abs(rep.quad_value.real() - direct) <= rep.error_budget);
}

TEST_CASE("cross-oracle: exact diagonal equals quadrature within budgets") {
    Setup s;
    struct Case {
        double T, Y;
        int k;
    };
    for (Case c : {Case{1e4, 120.0, 1}, Case{1e4, 200.0, 2}, Case{2e4, 80.0, 2}}) {
        auto params = derive_params(c.T, 2.5, 2.2, 400, 80, c.Y, 5000.0);
        auto sc = ShiftConfig::make({0.0}, c.T, 10, 10, 0.5);
        long nodes = required_nodes(c.T, c.Y, c.k, c.k);
        auto quad = quad_moment({1.0}, sc, {s.g5[1]}, params, c.k, c.k, nodes, s.table);
        double exact = exact_diagonal_moment({1.0}, sc, {s.g5[1]}, params, c.k, s.table);
        CHECK(std::abs(quad.quad_value.real() - exact) <= quad.error_budget);
        CHECK(std::abs(quad.quad_value.real() - exact) / exact < 0.08);
    }
}

TEST_CASE("exact_diagonal_moment: k=2 against the ordered double loop") {
    Setup s;
    auto params = derive_params(1e4, 2.5, 2.2, 400, 80, 200.0, 5000.0);
    auto sc = ShiftConfig::make({0.0, 0.05}, 1e4, 10, 10, 0.5);
    std::vector<DirichletCharacter> chars{s.g5[1], s.g5[2]};
    std::vector<double> a{1.0, -0.5};
    double mine = exact_diagonal_moment(a, sc, chars, params, 2, s.table);
    // independent route: full ordered double loop over x_p = |psi(p)|^2/p^{2s0}
    double S = 0, P2 = 0;
    for (uint64_t p : s.table.primes) {
        if (double(p) > 200.0) break;
        std::complex<double> psi{0.0, 0.0};
        double lp = std::log(double(p));
        for (int j = 0; j < 2; ++j)
            psi += a[j] * chars[j].evaluate(p) * std::polar(1.0, -sc.alphas[j] * lp);
        double x = std::norm(psi) * std::pow(double(p), -2.0 * params.sigma0);
        S += x;
        P2 += x * x;
    }
    double direct = 2.0 * S * S - P2;  // sum over ordered pairs with b-weights
    CHECK(mine == doctest::Approx(direct).epsilon(1e-12));
    // k = 0 and k = 1
    CHECK(exact_diagonal_moment(a, sc, chars, params, 0, s.table) == 1.0);
    CHECK(exact_diagonal_moment(a, sc, chars, params, 1, s.table) == doctest::Approx(S).epsilon(1e-12));
}

TEST_CASE("exact_diagonal_moment: enumeration budget is enforced") {
    Setup s;
    auto params = derive_params(1e9, 2.5, 2.2, 400, 80, 1e5, 1e6);
    auto sc = ShiftConfig::make({0.0}, 1e9, 10, 10, 0.5);
    CHECK_THROWS_AS(exact_diagonal_moment({1.0}, sc, {s.g5[1]}, params, 3, s.table), CapacityError);
}

TEST_CASE("off-diagonal moment decays with T") {
    Setup s;
    std::complex<double> v[2];
    int i = 0;
    for (double T : {1e4, 1e5}) {
        auto params = derive_params(T, 2.5, 2.2, 400, 80, 60.0, 5000.0);
        auto sc = ShiftConfig::make({0.0}, T, 10, 10, 0.5);
        long nodes = required_nodes(T, 60.0, 1, 2);
        v[i++] = quad_moment({1.0}, sc, {s.g5[1]}, params, 1, 2, nodes, s.table).quad_value;
    }
    CHECK(std::abs(v[1]) < std::abs(v[0]));
}

TEST_CASE("chebyshev_tail") {
    CHECK(chebyshev_tail(1.0, 1.0, 1) == 1.0);
    CHECK(chebyshev_tail(1.0, 3.0, 1) == doctest::Approx(1.0 / 9.0));
    CHECK(1.0 / 9.0 >= std::erfc(3.0 / std::sqrt(2.0)));
    CHECK_THROWS_AS(chebyshev_tail(-1.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(chebyshev_tail(1.0, 0.0, 1), std::invalid_argument);
}

TEST_CASE("high-moment Chebyshev envelope via Stirling in log space") {
    // k = floor(loglog T), moment (2k)!/(k! 2^k) (loglogT/2)^k, threshold
    // loglog T: the Chebyshev bound reproduces the 1/log T envelope.
    for (double T : {1e30, 1e120, 1e300}) {
        double llT = std::log(std::log(T));
        long k = static_cast<long>(llT);
        double log_bound = std::lgamma(2.0 * k + 1) - std::lgamma(k + 1.0) - k * std::log(2.0) +
                           k * std::log(0.5 * llT) - 2.0 * k * std::log(llT);
        CHECK(log_bound <= -0.6 * llT);
        CHECK(log_bound >= -1.4 * llT);
    }
}

TEST_CASE("p1_exp_tail") {
    double T = 1e40;
    double llT = std::log(std::log(T));
    // the In-particular clause: r = loglog T reproduces 1/(sqrt(loglogT) log T) + 1/T
    double b = p1_exp_tail(llT, T);
    double shape = std::sqrt(1.0 / 3.141592653589793) / std::sqrt(llT) / std::log(T) + 1.0 / T;
    CHECK(b == doctest::Approx(shape).epsilon(1e-12));
    // r -> infinity: only the 1/T floor survives
    CHECK(p1_exp_tail(1e6, T) == doctest::Approx(1.0 / T).epsilon(1e-6));
    CHECK_THROWS_AS(p1_exp_tail(0.0, T), std::invalid_argument);
}

TEST_CASE("exp_partial_bound_check") {
    auto r0 = exp_partial_bound_check({0.0, 0.0}, 1);
    CHECK(r0.lhs == doctest::Approx(0.0));
    CHECK(r0.rhs == doctest::Approx(std::exp(-1.0)));
    CHECK(r0.ok);

    auto r1 = exp_partial_bound_check({1.0, 0.0}, 15);
    CHECK(r1.ok);

    std::complex<double> z{10.0, 10.0};
    int n = static_cast<int>(std::ceil(7.5 * (std::abs(z) + 1.0)));
    auto r2 = exp_partial_bound_check(z, n);
    CHECK(r2.ok);
    CHECK(r2.lhs > 0.0);  // extended precision resolves the cancellation

    CounterRng rng(55, 0);
    for (int it = 0; it < 200; ++it) {
        double re = 40.0 * rng.next_unit() - 20.0;
        double im = 40.0 * rng.next_unit() - 20.0;
        std::complex<double> zz{re, im};
        if (std::abs(zz) > 20.0) continue;
        int nn = static_cast<int>(std::ceil(7.5 * (std::abs(zz) + 1.0)));
        CHECK(exp_partial_bound_check(zz, nn).ok);
    }
}

TEST_CASE("stirling_bounds") {
    auto r1 = stirling_bounds(1);
    CHECK(r1.main == doctest::Approx(std::sqrt(2.0 * 3.141592653589793) / std::exp(1.0)));
    CHECK(r1.rel_err == doctest::Approx(std::exp(1.0) / std::sqrt(2.0 * 3.141592653589793) - 1.0)
                            .epsilon(1e-12));
    auto r10 = stirling_bounds(10);
    CHECK(r10.value == doctest::Approx(3628800.0));
    CHECK(r10.rel_err == doctest::Approx(0.008365).epsilon(1e-3));
    double prev = 1e9;
    for (long n = 1; n <= 1000; ++n) {
        auto r = stirling_bounds(n);
        if (n >= 2) CHECK(r.rel_err <= 1.0 / (4.0 * double(n)));
        CHECK(r.rel_err < prev);
        prev = r.rel_err;
    }
    auto big = stirling_bounds(1'000'000);
    CHECK(std::isfinite(big.rel_err));  // log-space evaluation
    CHECK(big.rel_err == doctest::Approx(1.0 / 12e6).epsilon(1e-2));
}

TEST_CASE("mollifier_mean_square: reduction, positivity, scale trend") {
    Setup s;
    auto chi = s.g5[1];
    auto p3 = derive_params(1e3, 2.5, 2.2, 400, 80, 100.0, 500.0);
    auto p4 = derive_params(1e4, 2.5, 2.2, 400, 80, 100.0, 500.0);

    // cutoff 1 makes M identically 1: value equals mean |1 - L|^2, which an
    // independent direct average over the same grid reproduces
    double v = mollifier_mean_square(chi, p3, 1, 4096, s.table);
    CHECK(v >= 0.0);
    LTruncEvaluator lev(chi, p3.sigma0, 1000);
    double h = 1e3 / 4096.0;
    double acc = 0.0;
    for (long i = 0; i <= 4096; ++i) {
        double t = 1e3 + h * i;
        auto L = lev.value(t);
        double d = std::norm(std::complex<double>{1.0, 0.0} - L);
        acc += (i == 0 || i == 4096) ? 0.5 * d : d;
    }
    CHECK(v == doctest::Approx(acc * h / 1e3).epsilon(1e-10));

    // mollified mean square decreases from T=1e3 to T=1e4
    double m3 = mollifier_mean_square(chi, p3, 2000, 4096, s.table);
    double m4 = mollifier_mean_square(chi, p4, 2000, 8192, s.table);
    CHECK(m3 >= 0.0);
    CHECK(m4 >= 0.0);
    CHECK(m4 < m3);

    CHECK_THROWS_AS(mollifier_mean_square(chi, derive_params(1e6, 2.5, 2.2, 400, 80, 100.0, 500.0),
                                          2000, 1024, s.table),
                    CapacityError);
}
