#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace patrol {

// Counter-based random numbers. Every stochastic source in the simulator
// draws from its own named stream keyed by (seed, stream name, instance),
// so reseeding or reordering one source never perturbs another, and any
// draw can be reproduced as a pure function of its key.

constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_str(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

constexpr double u64_to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Pure keyed draw in [0,1): a function of (seed, stream, inputs) with no
// hidden state. Each key word is spread by its own odd multiplier before
// mixing; unit-sized input differences (adjacent timesteps, edge indices)
// must not leave joint correlations.
inline double keyed_uniform(std::uint64_t seed, std::string_view stream,
                            std::uint64_t a = 0, std::uint64_t b = 0,
                            std::uint64_t c = 0) {
    std::uint64_t k = mix64(seed ^ hash_str(stream));
    k = mix64(k ^ (a * 0x9E3779B97F4A7C15ull));
    k = mix64(k ^ (b * 0xC2B2AE3D27D4EB4Full));
    k = mix64(k ^ (c * 0x165667B19E3779F9ull));
    return u64_to_unit(mix64(k));
}

class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view name, std::uint64_t instance = 0)
        : key_(mix64(mix64(seed ^ hash_str(name)) ^ instance)) {}

    std::uint64_t next_u64() { return mix64(key_ + 0x9E3779B97F4A7C15ull * ++ctr_); }

    double uniform() { return u64_to_unit(next_u64()); }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    // Uniform integer in [0, n), n > 0.
    std::uint32_t uniform_int(std::uint32_t n) {
        return static_cast<std::uint32_t>(uniform() * n) % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    double normal() {
        double u1 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692 * u2);
    }

    // Independent child stream; drawing from it does not advance the parent.
    RngStream substream(std::uint64_t instance) const {
        RngStream s;
        s.key_ = mix64(key_ ^ mix64(instance ^ 0xA5A5A5A5A5A5A5A5ull));
        return s;
    }

private:
    RngStream() = default;
    std::uint64_t key_ = 0;
    std::uint64_t ctr_ = 0;
};

}  // namespace patrol
