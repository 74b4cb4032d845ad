#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace emsim {

/// SplitMix64 finalizer. Used as the seed-splitting primitive everywhere:
/// independent child streams are derived by mixing a master seed with a
/// path of indices, so parallel work can own private generators while the
/// overall result stays a pure function of (master seed, indices).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Child seed for the stream identified by `path` under `master`.
/// derive_seed(s, {a, b}) != derive_seed(s, {b, a}) by construction.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(master);
    for (std::uint64_t p : path)
        s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

/// Uniform double in [0, 1) from the top 53 bits; portable across stdlibs.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Standard normal via Marsaglia polar; consumes a parameter-independent
/// number of engine draws so coupled-seed streams stay aligned.
class StandardNormal {
  public:
    double operator()(Rng& rng) {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01(rng) - 1.0;
            v = 2.0 * uniform01(rng) - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

  private:
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace emsim
