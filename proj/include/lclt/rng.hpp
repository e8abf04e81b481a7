#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace lclt {

// Counter-based random stream keyed by (seed, index, stream).  Every sample
// index owns an independent generator, so results do not depend on how work
// is split across threads.  The key is run through two full splitmix64
// mixing rounds before any output is taken.
class CounterRng {
  public:
    CounterRng(uint64_t seed, uint64_t index, uint64_t stream = 0) {
        state_ = mix(seed ^ mix(index + 0x9E3779B97F4A7C15ull * (stream + 1)));
        state_ = mix(state_ + 0xBF58476D1CE4E5B9ull);
    }

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1), 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0,1]; safe as a log argument.
    double next_open() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Box-Muller pair of independent standard normals.
    std::pair<double, double> next_normal_pair() {
        double u1 = next_open();
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

  private:
    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 33)) * 0xFF51AFD7ED558CCDull;
        z = (z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53ull;
        return z ^ (z >> 33);
    }

    uint64_t state_;
};

// Fills `out[0..n)` with standard normals for one sample index.
inline void fill_normals(uint64_t seed, uint64_t index, uint64_t stream, double* out, int n) {
    CounterRng rng(seed, index, stream);
    int i = 0;
    while (i + 1 < n) {
        auto [a, b] = rng.next_normal_pair();
        out[i++] = a;
        out[i++] = b;
    }
    if (i < n) out[i] = rng.next_normal_pair().first;
}

}  // namespace lclt
