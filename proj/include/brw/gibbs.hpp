#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "brw/field.hpp"
#include "brw/stats.hpp"

namespace brw {

// Critical inverse temperature sqrt(2 log 2).
inline constexpr double kBetaCritical = 1.1774100225154746910;

// Two doubles per vertex; depth 26 lands exactly on this.
inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{2} << 30;

struct GibbsParams {
    int depth = 0;
    double beta = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Closed-form infinite-depth free energy.
double free_energy_limit(double beta);

// Per-disorder partition structure over the full tree. Stores every
// increment and every subtree log-partition value, heap-indexed, which is
// enough to answer exact questions about the Gibbs measure of this
// realization: total log Z, subtree masses, overlap laws, mean energy,
// and leaf sampling.
class PartitionTable {
public:
    static PartitionTable build(const GibbsParams& params,
                                std::size_t memory_budget = kDefaultMemoryBudget);

    // Same table built from caller-supplied increments. Lets tests pin
    // disorder to hand-picked values.
    static PartitionTable build_with(
        int depth, double beta,
        const std::function<double(NodeRef)>& increment_fn,
        std::size_t memory_budget = kDefaultMemoryBudget);

    int depth() const noexcept { return depth_; }
    double beta() const noexcept { return beta_; }

    double log_partition() const noexcept { return values_[1]; }

    double increment(NodeRef node) const;

    // Log-sum-exp of beta times path sums over leaves below `node`,
    // with paths counted from just below `node`.
    double subtree_value(NodeRef node) const;

    // Sum of increments from the root down to `node`.
    double path_sum(NodeRef node) const;

    // Gibbs probability that a sampled leaf passes through `node`.
    double log_mass(NodeRef node) const;
    double mass(NodeRef node) const;

    // Calls visit(d, logmass) for d = 0..depth, where logmass[i] is the
    // log Gibbs mass of node (d, i). Buffers are reused between levels.
    // A non-negative max_depth stops the sweep early.
    void sweep_log_masses(
        const std::function<void(int, const std::vector<double>&)>& visit,
        int max_depth = -1) const;

    // Gibbs-average energy <H> for this disorder, exactly.
    double mean_energy() const;

    // E<R12^p1 * R13^p2> for this disorder, exactly: replicas 2 and 3 are
    // conditionally independent given replica 1's leaf, so the average
    // factors through per-ancestor masses.
    double mixed_overlap_moment(int p1, int p2) const;

    // One Gibbs leaf. Consumes `depth` counters starting at
    // draw_index * depth, so distinct draw indices never overlap.
    NodeRef sample_leaf(const SplitMix64& gen, std::uint64_t draw_index) const;

private:
    PartitionTable() = default;

    int depth_ = 0;
    double beta_ = 0.0;
    std::vector<double> incs_;    // increment by heap id, id >= 2
    std::vector<double> values_;  // subtree log-partition by heap id
};

// log Z without materializing the table: depth-first recursion, constant
// memory. Combines values in the same order as the table build.
double log_partition_streaming(const GibbsParams& params);

struct FreeEnergyEstimate {
    int depth = 0;
    double beta = 0.0;
    Estimate value;                       // mean of log Z / depth over disorders
    std::vector<double> per_replicate;    // log Z / depth, one per disorder
};

FreeEnergyEstimate free_energy(int depth, double beta, std::size_t replicates,
                               std::uint64_t seed, unsigned threads = 1);

// Disorder-averaged two-replica overlap law on {0, 1/N, ..., 1}, or the
// law of a single realization when built from one table.
struct OverlapLaw {
    int depth = 0;
    // tail[d] = P(overlap >= d/N); tail[0] = 1.
    std::vector<double> tail;

    double atom(int d) const;
    double mean() const;            // E[R]
    double moment(int p) const;     // E[R^p]
    // Sum of atoms with d in [dlo, dhi], clamped to range.
    double mass_range(int dlo, int dhi) const;
    // Three-bin summary: [0, 1/4], (1/4, 3/4), [3/4, 1].
    double mass_low() const;
    double mass_mid() const;
    double mass_high() const;
};

// Exact law for one disorder realization.
OverlapLaw overlap_law_exact(const PartitionTable& table);

// Average of per-disorder laws.
OverlapLaw average_overlap_laws(const std::vector<OverlapLaw>& laws);

// Largest leaf path sum of a disorder realization, streamed.
double leader_max_streaming(const IncrementOracle& field);

} // namespace brw
