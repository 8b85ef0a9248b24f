#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace ctox {

// Deterministic random source. The engine is std::mt19937_64, whose output
// sequence is pinned by the standard; all value transforms are implemented
// here rather than with std::*_distribution, whose algorithms are
// implementation-defined. Identical seeds therefore give identical streams
// on every platform and compiler.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n), unbiased via rejection. n must be > 0.
    uint64_t below(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    size_t index(size_t n) { return static_cast<size_t>(below(n)); }

    // Standard normal via Box-Muller. Both variates of a pair are used, so
    // the stream advances by exactly two draws per pair.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    double lognormal(double mu_log, double sigma_log) {
        return std::exp(mu_log + sigma_log * normal());
    }

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (size_t i = items.size(); i > 1; --i) {
            size_t j = index(i);
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// SplitMix64 step, used for seed derivation.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent child seed from (seed, domain). Used to give each
// suite cell / repetition its own stream so results do not depend on
// evaluation order.
inline uint64_t derive_seed(uint64_t seed, std::string_view domain) {
    uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the domain tag
    for (char c : domain) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    uint64_t state = seed ^ h;
    return splitmix64(state);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t counter) {
    uint64_t state = seed ^ (0x9e3779b97f4a7c15ULL * (counter + 1));
    return splitmix64(state);
}

}  // namespace ctox
