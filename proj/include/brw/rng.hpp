#pragma once

#include <cstdint>

namespace brw {

// 64-bit finalizer used everywhere randomness is derived from integers.
// Bijective on uint64, so distinct counters never collide.
std::uint64_t mix64(std::uint64_t z) noexcept;

// Stable derivation of child seeds from a base seed and an index.
// derive_seed(s, i) != derive_seed(s, j) for i != j in practice, and the
// result is safe to feed back into further derivations.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

// Inverse of the standard normal CDF, good to ~1e-15 over (0, 1).
double inverse_normal_cdf(double p);

// Small counter-based generator: output k is a pure function of (seed, k),
// so any stream position can be read without generating its predecessors.
// Sequential use via next() matches indexed use via at().
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept;

    std::uint64_t at(std::uint64_t counter) const noexcept;
    std::uint64_t next() noexcept { return at(counter_++); }

    // Uniform on (0, 1), strictly inside the open interval.
    double uniform_at(std::uint64_t counter) const noexcept;
    double uniform() noexcept { return uniform_at(counter_++); }

    // Standard normal via the inverse CDF.
    double normal_at(std::uint64_t counter) const noexcept;
    double normal() noexcept { return normal_at(counter_++); }

    // Exponential with mean 1.
    double exponential_at(std::uint64_t counter) const noexcept;
    double exponential() noexcept { return exponential_at(counter_++); }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

} // namespace brw
