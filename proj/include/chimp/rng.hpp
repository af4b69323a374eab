#pragma once

#include <cstdint>

namespace chimp {

// Deterministic splitmix64 stream (Steele/Lea/Flood). All randomness in the
// project flows through this class so that runs are reproducible across
// platforms and standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Uniform value in [0, n). n must be > 0. Rejection sampling keeps the
    // distribution exact and the draw sequence platform-independent.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform integer in [lo, hi], inclusive.
    long long range(long long lo, long long hi) {
        return lo + static_cast<long long>(
                        below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool coin() { return below(2) == 1; }

    // splitmix64 finalizer.
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Index-keyed split of a seed into an independent child seed. Used to
    // derive per-sample seeds from a suite seed so any sample can be
    // reproduced in isolation from (seed, index).
    static std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
        return mix(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
    }

private:
    std::uint64_t state_;
};

} // namespace chimp
