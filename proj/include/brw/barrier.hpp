#pragma once

#include <cstdint>
#include <vector>

#include "brw/field.hpp"
#include "brw/stats.hpp"

namespace brw {

// Centering sequence for the leading leaf path sum.
double leader_centering(int depth);

// Leading path sum minus the centering, one value per disorder.
struct LeaderGaps {
    int depth = 0;
    std::vector<double> gaps;
    double median_gap = 0.0;
    Estimate gap;
};

LeaderGaps leader_gaps(int depth, std::size_t replicates, std::uint64_t seed,
                       unsigned threads = 1);

// Monte Carlo estimate with hit bookkeeping. `unreliable` marks runs with
// fewer than 10 hits, whose standard error cannot be trusted.
struct McEstimate {
    double estimate = 0.0;
    double se = 0.0;
    std::size_t samples = 0;
    std::size_t hits = 0;
    bool unreliable = false;
};

// Simple walk held at or above zero: steps of +-1 from `start`, required
// nonnegative strictly inside (0, steps), endpoint in [window_lo, window_hi].
struct BallotParams {
    int steps = 0;
    int start = 0;
    int window_lo = 0;
    int window_hi = 0;

    void validate() const;
};

McEstimate ballot_estimate(const BallotParams& params, std::size_t samples,
                           std::uint64_t seed, unsigned threads = 1);

// Gaussian walk kept below a sloped line: from `start`, increments are
// standard normal; the event is
//   S(l) <= drift * l + offset   for every l = 1..steps, and
//   S(steps) - drift * steps in [window_lo, window_hi].
struct WalkParams {
    int steps = 0;
    double start = 0.0;
    double drift = 0.0;
    double offset = 0.0;      // line height above the drift at l = 0
    double window_lo = 0.0;
    double window_hi = 0.0;

    void validate() const;
};

enum class BarrierMethod { direct, tilted };

// direct: plain Monte Carlo on the original walk. tilted: walk with mean
// shifted onto the line's slope, each hit weighted back by the exact
// density ratio exp(-drift (S(T) - start) + T drift^2 / 2).
McEstimate barrier_estimate(const WalkParams& params, std::size_t samples,
                            BarrierMethod method, std::uint64_t seed,
                            unsigned threads = 1);

// Fraction of disorders whose tree contains some vertex at depth l with
// path sum >= (centering/depth) * l + kappa * log(depth).
struct GammaParams {
    int depth = 0;
    double kappa = 0.0;

    void validate() const;
};

McEstimate gamma_event_estimate(const GammaParams& params,
                                std::size_t replicates, std::uint64_t seed,
                                unsigned threads = 1);

} // namespace brw
