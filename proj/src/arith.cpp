#include "lclt/arith.hpp"

#include <algorithm>
#include <cmath>

#include "lclt/characters.hpp"

namespace lclt {

size_t PrimeTable::upper_index(double x) const {
    if (x < 0) return 0;
    uint64_t bound = x >= static_cast<double>(limit) ? limit : static_cast<uint64_t>(std::floor(x));
    return static_cast<size_t>(std::upper_bound(primes.begin(), primes.end(), bound) - primes.begin());
}

PrimeTable sieve_primes(uint64_t limit, uint64_t capacity) {
    if (limit < 2) throw std::invalid_argument("sieve_primes: limit must be >= 2");
    if (limit > capacity) throw CapacityError("sieve_primes: limit exceeds sieve capacity");

    PrimeTable table;
    table.limit = limit;

    // Base primes up to sqrt(limit) by a plain sieve.
    uint64_t root = static_cast<uint64_t>(std::sqrt(static_cast<double>(limit)));
    while ((root + 1) * (root + 1) <= limit) ++root;
    std::vector<uint8_t> base(root + 1, 1);
    std::vector<uint64_t> base_primes;
    for (uint64_t i = 2; i <= root; ++i) {
        if (!base[i]) continue;
        base_primes.push_back(i);
        for (uint64_t j = i * i; j <= root; j += i) base[j] = 0;
    }

    constexpr uint64_t kSegment = 1u << 20;
    std::vector<uint8_t> seg(kSegment);
    for (uint64_t lo = 2; lo <= limit; lo += kSegment) {
        uint64_t hi = std::min(limit, lo + kSegment - 1);
        std::fill(seg.begin(), seg.begin() + (hi - lo + 1), 1);
        for (uint64_t p : base_primes) {
            if (p * p > hi) break;
            uint64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
            for (uint64_t j = start; j <= hi; j += p) seg[j - lo] = 0;
        }
        for (uint64_t v = lo; v <= hi; ++v)
            if (seg[v - lo] && v >= 2) table.primes.push_back(v);
    }

    table.log_p.reserve(table.primes.size());
    for (uint64_t p : table.primes) table.log_p.push_back(std::log(static_cast<double>(p)));
    return table;
}

std::vector<Factor> factorize(uint64_t n, const PrimeTable& table) {
    if (n == 0) throw std::invalid_argument("factorize: n must be >= 1");
    std::vector<Factor> out;
    uint64_t m = n;
    for (uint64_t p : table.primes) {
        if (p * p > m) break;
        if (m % p == 0) {
            int k = 0;
            while (m % p == 0) {
                m /= p;
                ++k;
            }
            out.push_back({p, k});
        }
    }
    if (m > 1) {
        // The remaining cofactor is prime only if trial division covered sqrt(m).
        if (table.limit < m && table.limit * table.limit < m)
            throw CapacityError("factorize: input exceeds trial-division cap");
        out.push_back({m, 1});
    }
    return out;
}

int mobius(uint64_t n, const PrimeTable& table) {
    if (n == 0) throw std::invalid_argument("mobius: n must be >= 1");
    auto fs = factorize(n, table);
    int sign = 1;
    for (const auto& f : fs) {
        if (f.k > 1) return 0;
        sign = -sign;
    }
    return sign;
}

double von_mangoldt(uint64_t n, const PrimeTable& table) {
    if (n == 0) throw std::invalid_argument("von_mangoldt: n must be >= 1");
    if (n == 1) return 0.0;
    auto fs = factorize(n, table);
    if (fs.size() != 1) return 0.0;
    return std::log(static_cast<double>(fs[0].p));
}

int count_prime_factors_in_range(uint64_t n, double lo, double hi, const PrimeTable& table) {
    if (n == 0) throw std::invalid_argument("count_prime_factors_in_range: n must be >= 1");
    if (!(lo > 0) || lo > hi) throw std::invalid_argument("count_prime_factors_in_range: need 0 < lo <= hi");
    int count = 0;
    for (const auto& f : factorize(n, table)) {
        double p = static_cast<double>(f.p);
        if (p > lo && p <= hi) count += f.k;
    }
    return count;
}

int big_omega(uint64_t n, const PrimeTable& table) {
    if (n == 0) throw std::invalid_argument("big_omega: n must be >= 1");
    int count = 0;
    for (const auto& f : factorize(n, table)) count += f.k;
    return count;
}

std::complex<double> prime_sum(const DirichletCharacter& chi, double lambda, double sigma,
                               double z, const PrimeTable& table) {
    if (!(sigma > 0)) throw std::invalid_argument("prime_sum: sigma must be > 0");
    if (z > static_cast<double>(table.limit)) throw CapacityError("prime_sum: z exceeds sieve capacity");
    KahanSum re, im;
    size_t end = table.upper_index(z);
    for (size_t i = 0; i < end; ++i) {
        std::complex<double> cv = chi.evaluate(table.primes[i]);
        if (cv == 0.0) continue;
        double lp = table.log_p[i];
        double mag = std::exp(-sigma * lp);
        double ang = -lambda * lp;
        std::complex<double> term = cv * std::polar(mag, ang);
        re.add(term.real());
        im.add(term.imag());
    }
    return {re.value(), im.value()};
}

}  // namespace lclt
