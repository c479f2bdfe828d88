#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "brw/cascade.hpp"
#include "brw/gibbs.hpp"
#include "brw/stats.hpp"

namespace brw {

// Overlap array of n independent Gibbs draws from one disorder
// realization. Entry (i, j) is the normalized split depth, diagonal 1.
// Draw block `block` consumes leaf draws block*n .. block*n + n - 1.
std::vector<std::vector<double>> sample_overlap_array(const PartitionTable& table,
                                                      int n,
                                                      const SplitMix64& gen,
                                                      std::uint64_t block);

// Bounded function of a replica overlap array, parsed from text:
//   "1"                 constant one
//   "R12", "R13^2"      single-pair overlap power (indices 1-based)
//   "R12*R34"           product over several pairs
//   "pattern:{1,2}{3}"  indicator that thresholding at the cutoff
//                       induces exactly this partition
struct OverlapFunction {
    enum class Kind { one, monomial, pattern };

    Kind kind = Kind::one;
    std::vector<std::array<int, 3>> factors;   // (i, j, power), i < j
    Pattern pattern;
    std::string text = "1";

    static OverlapFunction parse(const std::string& text, int n);

    double eval(const std::vector<std::vector<double>>& overlaps,
                double cutoff) const;

    // True when the identity terms for this function reduce to one- and
    // two-pair moments with exact per-disorder values.
    bool exact_capable() const;
};

// Thermal-average energy against temperature-derivative bookkeeping:
// lhs = <H>/(beta N), rhs = 1 - <R12>, both exact per disorder.
struct IbpResult {
    int depth = 0;
    double beta = 0.0;
    Estimate lhs;
    Estimate rhs;
    Estimate diff;          // paired, same disorders on both sides
    bool degenerate = false;  // no disorder variation in <H>
};

IbpResult ibp_check(int depth, double beta, std::size_t replicates,
                    std::uint64_t seed, unsigned threads = 1);

// Same check on caller-built tables (pinned disorder in tests).
IbpResult ibp_check_tables(const std::vector<PartitionTable>& tables);

// Central-difference derivative of the mean log-partition against the
// exact overlap form, common disorder across the whole grid.
struct FdPoint {
    double beta = 0.0;
    double fd = 0.0;        // mean of (log Z(b+h) - log Z(b-h)) / (2 h N)
    double direct = 0.0;    // mean of beta (1 - <R12>)
    Estimate diff;          // paired per-disorder difference
};

struct FdResult {
    int depth = 0;
    double step = 0.0;
    std::size_t replicates = 0;
    std::vector<FdPoint> points;
};

FdResult fd_derivative_check(int depth, const std::vector<double>& betas,
                             double step, std::size_t replicates,
                             std::uint64_t seed, unsigned threads = 1);

// Replica-coupling residual for one (n, p, f) combination:
//   E<f R_{1,n+1}^p> - (1/n) [ E<f> E<R12^p> + sum_{k=2..n} E<f R_1k^p> ]
struct GgiSpec {
    int n = 2;
    int p = 1;
    std::string f = "1";
};

struct GgiOptions {
    int depth = 10;
    double beta = 2.0 * kBetaCritical;
    std::size_t disorders = 200;
    std::size_t draws = 128;      // replica draws per disorder (sampled path)
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::size_t batches = 20;     // disorder batches for the residual se
    double cutoff = 0.5;          // pattern threshold

    void validate() const;
};

struct GgiResult {
    GgiSpec spec;
    int depth = 0;
    double beta = 0.0;
    double coupled = 0.0;      // E<f R_{1,n+1}^p>
    double decoupled = 0.0;    // the weighted right-hand side
    Estimate residual;
    bool exact = false;        // no replica sampling was needed
    std::size_t disorders = 0;
    // Per-disorder terms: coupled, <f>, cross sum, <R12^p>.
    std::vector<std::array<double, 4>> per_disorder;
};

GgiResult ggi_residual(const GgiSpec& spec, const GgiOptions& options);

// Shares disorder realizations (tables, laws, replica draws) across all
// requested combinations.
std::vector<GgiResult> ggi_residual_batch(const std::vector<GgiSpec>& specs,
                                          const GgiOptions& options);

// Probability that n Gibbs draws, thresholded, induce the pattern.
Estimate tree_pattern_prob(const PartitionTable& table, const Pattern& pattern,
                           std::size_t draws, std::uint64_t seed,
                           double cutoff = 0.5, std::size_t batches = 20);

} // namespace brw
