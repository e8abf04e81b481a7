#include <doctest.h>

#include <complex>
#include <map>

#include "lclt/characters.hpp"

using namespace lclt;

TEST_CASE("character_group sizes and principal count") {
    for (uint64_t q : {1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 16, 24, 36, 60, 100}) {
        auto g = character_group(q);
        CHECK(g.size() == euler_phi(q));
        int principals = 0;
        for (auto& chi : g)
            if (chi.is_principal()) ++principals;
        CHECK(principals == 1);
        CHECK(g[0].is_principal());  // canonical order puts the principal first
    }
    CHECK_THROWS_AS(character_group(0), std::invalid_argument);
}

TEST_CASE("q=1: identically one") {
    auto g = character_group(1);
    REQUIRE(g.size() == 1);
    for (uint64_t n : {1, 2, 3, 17, 100})
        CHECK(g[0].evaluate(n) == std::complex<double>{1.0, 0.0});
}

TEST_CASE("q=4: the non-principal character has chi(3) = -1") {
    auto g = character_group(4);
    REQUIRE(g.size() == 2);
    const auto& chi = g[1];
    CHECK(!chi.is_principal());
    CHECK(chi.evaluate(3).real() == doctest::Approx(-1.0));
    CHECK(chi.evaluate(3).imag() == doctest::Approx(0.0));
    CHECK(chi.evaluate(7).real() == doctest::Approx(-1.0));  // 7 = 3 mod 4
    CHECK(chi.evaluate(2) == std::complex<double>{0.0, 0.0});
}

TEST_CASE("q=5: an order-4 character sends 2 to a primitive fourth root") {
    auto g = character_group(5);
    REQUIRE(g.size() == 4);
    bool found_i = false;
    for (auto& chi : g) {
        auto v = chi.evaluate(2);
        if (std::abs(v.real()) < 1e-15 && std::abs(v.imag() - 1.0) < 1e-15) found_i = true;
    }
    CHECK(found_i);
}

TEST_CASE("evaluate: periodicity and zeros off coprime residues") {
    auto g = character_group(6);
    for (auto& chi : g) {
        CHECK(chi.evaluate(35) == chi.evaluate(35 % 6));
        CHECK(chi.evaluate(4) == std::complex<double>{0.0, 0.0});
        for (uint64_t n = 1; n <= 24; ++n)
            CHECK(std::abs(chi.evaluate(n) - chi.evaluate(n + 6)) < 1e-15);
    }
    CHECK(g[0].evaluate(35) == std::complex<double>{1.0, 0.0});
}

TEST_CASE("complete multiplicativity via exact exponents") {
    for (uint64_t q : {5, 8, 12, 15, 16, 21}) {
        auto g = character_group(q);
        for (auto& chi : g)
            for (uint64_t m = 1; m <= q; ++m)
                for (uint64_t n = 1; n <= q; ++n) {
                    if (!chi.is_coprime(m) || !chi.is_coprime(n)) continue;
                    Rational sum = chi.exponent(m) + chi.exponent(n);
                    CHECK(chi.exponent((m * n) % q) == sum);
                }
    }
}

TEST_CASE("orthogonality is exact in rational-exponent arithmetic") {
    // For a character of order d, the exponent multiset over coprime residues
    // must be phi(q)/d copies of each k/d; that makes sum chi(r) exactly 0
    // for non-principal chi and phi(q) for the principal one.
    for (uint64_t q = 1; q <= 100; ++q) {
        auto g = character_group(q);
        uint64_t phi = euler_phi(q);
        for (auto& chi : g) {
            std::map<std::pair<int64_t, int64_t>, uint64_t> counts;
            int64_t order = 1;
            for (uint64_t r = 1; r <= q || (q == 1 && r == 1); ++r) {
                uint64_t rr = q == 1 ? 0 : r % q;
                if (!chi.is_coprime(rr) && q != 1) continue;
                Rational e = q == 1 ? Rational{0, 1} : chi.exponent(rr);
                counts[{e.num, e.den}]++;
                order = std::lcm(order, e.den);
                if (q == 1) break;
            }
            if (chi.is_principal()) {
                CHECK(counts.size() == 1);
                CHECK(counts.begin()->second == std::max<uint64_t>(phi, 1));
            } else {
                REQUIRE(order > 1);
                CHECK(counts.size() == static_cast<size_t>(order));
                for (auto& [frac, cnt] : counts) CHECK(cnt == phi / static_cast<uint64_t>(order));
            }
        }
    }
}

TEST_CASE("group closure under pointwise product") {
    for (uint64_t q : {5, 12, 16}) {
        auto g = character_group(q);
        for (auto& a : g)
            for (auto& b : g) {
                // product exponents must match some group member exactly
                int found = 0;
                for (auto& c : g) {
                    bool same = true;
                    for (uint64_t r = 1; r <= q; ++r) {
                        if (!a.is_coprime(r)) continue;
                        if (!((a.exponent(r) + b.exponent(r)) == c.exponent(r))) {
                            same = false;
                            break;
                        }
                    }
                    if (same) ++found;
                }
                CHECK(found == 1);
            }
    }
}

TEST_CASE("pair_delta") {
    auto g5 = character_group(5);
    CHECK(pair_delta(g5[1], g5[1]) == 1);
    CHECK(pair_delta(g5[1], g5[2]) == 0);
    for (auto& chi : g5) CHECK(pair_delta(chi, chi) == 1);
    auto p3 = character_group(3)[0];
    auto p4 = character_group(4)[0];
    CHECK(pair_delta(p3, p4) == 1);  // both principal: product principal mod 12
    auto np4 = character_group(4)[1];
    CHECK(pair_delta(p3, np4) == 0);
}
