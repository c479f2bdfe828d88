#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "brw/gibbs.hpp"
#include "brw/rng.hpp"
#include "brw/stats.hpp"

namespace brw {

// Ranked-weight cascade parameters. theta in (0, 1]; theta = 1 is the
// degenerate dust case, returned as a single formal atom.
struct PdParams {
    double theta = 0.5;
    std::size_t max_atoms = 200000;
    double tail_tol = 1e-6;

    void validate() const;
};

struct RankedWeights {
    std::vector<double> weights;   // descending, normalized
    double tail_mass = 0.0;        // 1 - sum(weights), mass left in the cut

    double sum_sq() const;
};

// Ranked atoms from arrival times, cut once the expected mass below the
// last generated level is within tail_tol of the total. weights sum to
// 1 - tail_mass exactly.
RankedWeights pd_sample(const PdParams& params, SplitMix64& gen);

// A set partition of replicas {1..n}, blocks ordered by first element.
struct Pattern {
    int n = 0;
    std::vector<int> block_of;   // block index per replica, 0-based

    static Pattern parse(const std::string& text);
    static Pattern singletons(int n);

    // Builds the partition induced by thresholding a symmetric overlap
    // array at `cutoff`. Throws DomainError when the thresholded
    // relation is not transitive (tree and cascade overlaps always are).
    static Pattern from_overlaps(const std::vector<std::vector<double>>& overlaps,
                                 double cutoff);

    std::string to_string() const;
    int blocks() const;
    std::vector<int> block_sizes() const;

    bool operator==(const Pattern&) const = default;
};

// Every partition of {1..n} in canonical order.
std::vector<Pattern> all_patterns(int n);

// Probability that n draws from a random cascade measure induce the given
// pattern, where mu1 is the chance two draws share an atom. Computed by
// removing replicas one at a time:
//   last replica in a block of size m >= 2:  (mu1 + m - 2) / (n - 1)
//   last replica alone, k blocks total:      (1 - mu1)(k - 1) / (n - 1)
double pattern_prob(const Pattern& pattern, double mu1);

// Draws n cluster labels from one weight realization. A draw landing in
// the truncated tail gets a fresh label of its own.
std::vector<long long> draw_cluster_labels(const RankedWeights& weights, int n,
                                           const SplitMix64& gen,
                                           std::uint64_t block);

// 0/1 overlap array of n draws (1 on the diagonal).
std::vector<std::vector<double>> rpc_overlap_array(const RankedWeights& weights,
                                                   int n, const SplitMix64& gen,
                                                   std::uint64_t block);

// Monte Carlo pattern frequencies: fresh weight realization per sample,
// n draws each, every pattern of size n tallied from the same samples.
struct PatternCensus {
    int n = 0;
    std::size_t realizations = 0;
    std::vector<Pattern> patterns;
    std::vector<Estimate> probs;   // aligned with patterns
};

PatternCensus rpc_pattern_census(const PdParams& params, int n,
                                 std::size_t realizations, std::uint64_t seed,
                                 unsigned threads = 1, std::size_t batches = 20);

// Subtree Gibbs masses at cut depth ceil((1 - epsilon) * depth), ranked.
struct ClusterWeights {
    int cut_depth = 0;
    std::vector<double> weights;   // descending, sums to 1

    double sum_sq() const;
};

ClusterWeights cluster_weights(const PartitionTable& table, double epsilon);

} // namespace brw
