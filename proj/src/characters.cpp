#include "lclt/characters.hpp"

#include <algorithm>
#include <cmath>

namespace lclt {

namespace {

uint64_t gcd_u64(uint64_t a, uint64_t b) {
    while (b) {
        uint64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

uint64_t pow_mod(uint64_t base, uint64_t exp, uint64_t mod) {
    uint64_t r = 1 % mod;
    base %= mod;
    while (exp) {
        if (exp & 1) r = (__uint128_t)r * base % mod;
        base = (__uint128_t)base * base % mod;
        exp >>= 1;
    }
    return r;
}

std::vector<std::pair<uint64_t, int>> factor_small(uint64_t n) {
    std::vector<std::pair<uint64_t, int>> fs;
    for (uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        int k = 0;
        while (n % p == 0) {
            n /= p;
            ++k;
        }
        fs.push_back({p, k});
    }
    if (n > 1) fs.push_back({n, 1});
    return fs;
}

// Smallest primitive root mod p^k (p odd prime).
uint64_t primitive_root(uint64_t pk, uint64_t p, int k) {
    uint64_t phi = pk / p * (p - 1);
    auto qs = factor_small(p - 1);
    // Search a root mod p first.
    uint64_t g = 0;
    for (uint64_t cand = 2; cand < p; ++cand) {
        bool ok = true;
        for (auto& [q, e] : qs)
            if (pow_mod(cand, (p - 1) / q, p) == 1) {
                ok = false;
                break;
            }
        if (ok) {
            g = cand;
            break;
        }
    }
    if (k == 1) return g;
    // Lift: g or g+p generates mod p^2, and then mod all higher powers.
    if (pow_mod(g, p - 1, p * p) == 1) g += p;
    (void)phi;
    return g;
}

// One cyclic factor of (Z/q)^*: generator residue (mod q via CRT later) and order.
struct CyclicFactor {
    uint64_t pk;       // prime power
    uint64_t gen;      // generator of the factor inside (Z/pk)^* (or the <-1>/<5> pair member)
    uint64_t order;
};

}  // namespace

Rational Rational::mod1(int64_t a, int64_t b) {
    if (b <= 0) throw std::invalid_argument("Rational: denominator must be positive");
    a %= b;
    if (a < 0) a += b;
    int64_t g = std::gcd(a, b);
    if (g == 0) return {0, 1};
    return {a / g, b / g};
}

Rational Rational::operator+(const Rational& o) const {
    int64_t l = std::lcm(den, o.den);
    return mod1(num * (l / den) + o.num * (l / o.den), l);
}

Rational Rational::operator-(const Rational& o) const {
    int64_t l = std::lcm(den, o.den);
    return mod1(num * (l / den) - o.num * (l / o.den), l);
}

std::complex<double> Rational::to_complex() const {
    if (num == 0) return {1.0, 0.0};
    if (2 * num == den) return {-1.0, 0.0};
    if (4 * num == den) return {0.0, 1.0};
    if (4 * num == 3 * den) return {0.0, -1.0};
    double a = 6.283185307179586476925286766559 * static_cast<double>(num) / static_cast<double>(den);
    return {std::cos(a), std::sin(a)};
}

DirichletCharacter::DirichletCharacter(uint64_t q, std::vector<Rational> exps,
                                       std::vector<uint8_t> coprime, int index)
    : q_(q), exps_(std::move(exps)), coprime_(std::move(coprime)), index_(index) {
    principal_ = true;
    for (uint64_t r = 0; r < q_; ++r)
        if (coprime_[r] && !exps_[r].is_zero()) {
            principal_ = false;
            break;
        }
}

uint64_t euler_phi(uint64_t q) {
    uint64_t phi = q;
    for (auto& [p, k] : factor_small(q)) phi = phi / p * (p - 1);
    return phi;
}

std::vector<DirichletCharacter> character_group(uint64_t q) {
    if (q == 0) throw std::invalid_argument("character_group: q must be >= 1");
    if (q > 2'000'000) throw CapacityError("character_group: modulus too large");

    // Discrete-log tables per cyclic factor: for each residue r coprime to q,
    // its index along each generator.
    std::vector<CyclicFactor> factors;
    auto fs = factor_small(q);
    for (auto& [p, k] : fs) {
        uint64_t pk = 1;
        for (int i = 0; i < k; ++i) pk *= p;
        if (p == 2) {
            if (k == 1) continue;  // trivial group
            if (k == 2) {
                factors.push_back({pk, pk - 1, 2});  // <-1>
            } else {
                factors.push_back({pk, pk - 1, 2});                 // <-1>
                factors.push_back({pk, 5, pk / 4});                 // <5>, order 2^{k-2}
            }
        } else {
            uint64_t g = primitive_root(pk, p, k);
            factors.push_back({pk, g % pk, pk / p * (p - 1)});
        }
    }

    uint64_t phi = euler_phi(q);
    std::vector<uint8_t> coprime(q == 1 ? 1 : q, 0);
    for (uint64_t r = 0; r < std::max<uint64_t>(q, 1); ++r)
        if (gcd_u64(r % std::max<uint64_t>(q, 1), q) == 1 || q == 1) coprime[r] = 1;

    // Index of each coprime residue along each factor, found by enumerating
    // powers of the generator within its prime-power component.
    size_t nf = factors.size();
    std::vector<std::vector<uint32_t>> dlog(nf, std::vector<uint32_t>(std::max<uint64_t>(q, 1), 0));
    for (size_t fi = 0; fi < nf; ++fi) {
        const auto& F = factors[fi];
        // Map residues mod F.pk reached by powers of gen.  For 2^k (k>=3)
        // this covers only part of the group; the joint <-1,5> pass below
        // resolves the rest.
        std::vector<int64_t> log_pk(F.pk, -1);
        uint64_t cur = 1;
        for (uint64_t e = 0; e < F.order; ++e) {
            if (log_pk[cur] < 0) log_pk[cur] = static_cast<int64_t>(e);
            cur = (__uint128_t)cur * F.gen % F.pk;
        }
        // For 2^k (k>=3) the cyclic pieces overlap: a residue r mod 2^k is
        // (-1)^a 5^b.  Resolve both exponents jointly below instead.
        (void)log_pk;
        for (uint64_t r = 0; r < std::max<uint64_t>(q, 1); ++r) {
            if (!coprime[r]) continue;
            uint64_t rm = F.pk == 1 ? 0 : r % F.pk;
            if (log_pk[rm] >= 0) {
                dlog[fi][r] = static_cast<uint32_t>(log_pk[rm]);
            } else {
                dlog[fi][r] = UINT32_MAX;  // needs joint <-1,5> resolution
            }
        }
    }

    // Joint resolution for 2^k, k>=3: r = (-1)^a * 5^b mod 2^k.
    for (size_t fi = 0; fi < nf; ++fi) {
        if (factors[fi].gen != factors[fi].pk - 1 || factors[fi].pk < 8) continue;
        uint64_t pk = factors[fi].pk;
        size_t fminus = fi;            // <-1> factor
        size_t ffive = fi + 1;         // <5> factor (pushed immediately after)
        std::vector<int64_t> log5(pk, -1);
        uint64_t cur = 1;
        for (uint64_t e = 0; e < pk / 4; ++e) {
            log5[cur] = static_cast<int64_t>(e);
            cur = cur * 5 % pk;
        }
        for (uint64_t r = 0; r < std::max<uint64_t>(q, 1); ++r) {
            if (!coprime[r]) continue;
            uint64_t rm = r % pk;
            if (log5[rm] >= 0) {
                dlog[fminus][r] = 0;
                dlog[ffive][r] = static_cast<uint32_t>(log5[rm]);
            } else {
                uint64_t neg = pk - rm;
                dlog[fminus][r] = 1;
                dlog[ffive][r] = static_cast<uint32_t>(log5[neg]);
            }
        }
    }

    // Enumerate exponent tuples lexicographically (first factor slowest).
    std::vector<DirichletCharacter> group;
    group.reserve(phi);
    std::vector<uint64_t> tuple(nf, 0);
    int index = 0;
    while (true) {
        std::vector<Rational> exps(std::max<uint64_t>(q, 1), Rational{0, 1});
        for (uint64_t r = 0; r < std::max<uint64_t>(q, 1); ++r) {
            if (!coprime[r]) continue;
            Rational e{0, 1};
            for (size_t fi = 0; fi < nf; ++fi) {
                int64_t a = static_cast<int64_t>(tuple[fi]) * static_cast<int64_t>(dlog[fi][r]);
                e = e + Rational::mod1(a, static_cast<int64_t>(factors[fi].order));
            }
            exps[r] = e;
        }
        group.emplace_back(q, std::move(exps), coprime, index++);
        // odometer increment, last factor fastest
        size_t pos = nf;
        while (pos > 0) {
            --pos;
            if (++tuple[pos] < factors[pos].order) break;
            tuple[pos] = 0;
            if (pos == 0) {
                if (group.size() != phi)
                    throw std::logic_error("character_group: tuple enumeration mismatch");
                return group;
            }
        }
        if (nf == 0) break;  // q in {1,2}: single character
    }
    return group;
}

DirichletCharacter character_by_index(uint64_t q, int index) {
    auto g = character_group(q);
    if (index < 0 || static_cast<size_t>(index) >= g.size())
        throw ConfigError("character_by_index: index out of range for modulus");
    return g[static_cast<size_t>(index)];
}

int pair_delta(const DirichletCharacter& chi_i, const DirichletCharacter& chi_j) {
    uint64_t l = std::lcm(chi_i.modulus(), chi_j.modulus());
    if (l > 10'000'000) throw CapacityError("pair_delta: lcm of moduli too large");
    for (uint64_t r = 1; r <= l; ++r) {
        if (gcd_u64(r, l) != 1) continue;
        if (!chi_i.is_coprime(r) || !chi_j.is_coprime(r)) continue;
        Rational d = chi_i.exponent(r) - chi_j.exponent(r);
        if (!d.is_zero()) return 0;
    }
    return 1;
}

}  // namespace lclt
