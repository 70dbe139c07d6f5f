#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace icid {

// SplitMix64. Self-contained so that streams are bit-identical across
// platforms and standard libraries; every random artifact in the project is
// reproducible from a single 64-bit seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n) without modulo bias (Lemire reduction).
    std::uint64_t bounded(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal via Box-Muller; second value of each pair is cached.
    double next_gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        // u1 in (0, 1] keeps the log finite.
        double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// Fixed counter scheme for per-unit sub-seeds: unit i of a run seeded with
// `master` always sees the same stream, independent of thread scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
    Rng mix(master ^ (0xA0761D6478BD642FULL + counter * 0xE7037ED1A0B428DBULL));
    return mix.next_u64();
}

// k distinct indices drawn uniformly from [0, n). Rejection sampling while k
// is small relative to n, partial Fisher-Yates otherwise. Deterministic given
// the generator state.
inline std::vector<std::uint32_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                             Rng& rng) {
    if (k > n) throw std::invalid_argument("insufficient data for subsample");
    std::vector<std::uint32_t> out;
    out.reserve(k);
    if (k * 2 < n) {
        std::vector<bool> taken(n, false);
        while (out.size() < k) {
            auto idx = static_cast<std::uint32_t>(rng.bounded(n));
            if (!taken[idx]) {
                taken[idx] = true;
                out.push_back(idx);
            }
        }
    } else {
        std::vector<std::uint32_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<std::uint32_t>(i);
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
    }
    return out;
}

}  // namespace icid
