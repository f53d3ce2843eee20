#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace curio {

// Deterministic labeled random stream. The generator is splitmix64 seeded
// from (master seed, label), so every (seed, label) pair names the same
// sequence on every platform and distinct labels give unrelated streams.
// Distributions are implemented here instead of <random> because the
// standard library distributions are not bit-portable.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view label)
        : seed_(seed), label_(label), state_(stream_state(seed, label)) {}

    std::uint64_t seed() const { return seed_; }
    const std::string& label() const { return label_; }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Rejection sampling keeps it unbiased.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    // Standard normal via Box-Muller. Two uniforms per draw, no cached spare,
    // so the stream position is a pure function of the draw count.
    double normal() {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Categorical draw from nonnegative weights summing to ~1.
    std::size_t categorical(const std::vector<double>& probs) {
        const double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        return probs.empty() ? 0 : probs.size() - 1;
    }

private:
    static std::uint64_t stream_state(std::uint64_t seed, std::string_view label) {
        // FNV-1a over the seed bytes then the label bytes.
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (int i = 0; i < 8; ++i) {
            h ^= (seed >> (8 * i)) & 0xffull;
            h *= 0x100000001b3ull;
        }
        for (unsigned char c : label) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        return h;
    }

    std::uint64_t seed_;
    std::string label_;
    std::uint64_t state_;
};

} // namespace curio
