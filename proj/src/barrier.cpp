#include "brw/barrier.hpp"

#include <cmath>
#include <string>

#include "brw/errors.hpp"
#include "brw/gibbs.hpp"
#include "brw/parallel.hpp"

namespace brw {

double leader_centering(int depth) {
    if (depth < 1) throw DomainError("depth must be >= 1");
    const double n = static_cast<double>(depth);
    return kBetaCritical * n - 1.5 / kBetaCritical * std::log(n);
}

LeaderGaps leader_gaps(int depth, std::size_t replicates, std::uint64_t seed,
                       unsigned threads) {
    FieldParams{depth, 0}.validate();
    if (replicates < 2) throw DomainError("need at least 2 replicates");
    const double center = leader_centering(depth);
    const std::function<double(std::size_t)> one = [&](std::size_t r) {
        const IncrementOracle field({depth, derive_seed(seed, r)});
        return leader_max_streaming(field) - center;
    };
    LeaderGaps out;
    out.depth = depth;
    out.gaps = parallel_map<double>(replicates, one, threads);
    out.median_gap = median(out.gaps);
    out.gap = mean_se(out.gaps);
    return out;
}

namespace {

// Chunked Bernoulli accumulation: per-sample seeds keep the estimate
// independent of the thread count, chunks keep scheduling cheap.
McEstimate chunked_hits(std::size_t samples, std::uint64_t seed,
                        unsigned threads,
                        const std::function<bool(SplitMix64&)>& trial) {
    if (samples < 100) throw DomainError("need at least 100 samples");
    const std::size_t chunk = 4096;
    const std::size_t chunks = (samples + chunk - 1) / chunk;
    const std::function<std::uint64_t(std::size_t)> run =
        [&](std::size_t c) {
            const std::size_t lo = c * chunk;
            const std::size_t hi = std::min(lo + chunk, samples);
            std::uint64_t hits = 0;
            for (std::size_t i = lo; i < hi; ++i) {
                SplitMix64 gen(derive_seed(seed, i));
                if (trial(gen)) ++hits;
            }
            return hits;
        };
    const auto per_chunk = parallel_map<std::uint64_t>(chunks, run, threads);
    std::uint64_t hits = 0;
    for (auto h : per_chunk) hits += h;
    McEstimate e;
    e.samples = samples;
    e.hits = hits;
    const double n = static_cast<double>(samples);
    e.estimate = static_cast<double>(hits) / n;
    e.se = std::sqrt(e.estimate * (1.0 - e.estimate) / n);
    e.unreliable = hits < 10;
    return e;
}

} // namespace

void BallotParams::validate() const {
    if (steps < 1) throw DomainError("steps must be >= 1");
    if (start < 0) throw DomainError("start must be >= 0");
    if (window_lo < 0 || window_hi < window_lo)
        throw DomainError("window must satisfy 0 <= lo <= hi");
}

McEstimate ballot_estimate(const BallotParams& params, std::size_t samples,
                           std::uint64_t seed, unsigned threads) {
    params.validate();
    const int steps = params.steps;
    return chunked_hits(samples, seed, threads, [&](SplitMix64& gen) {
        int s = params.start;
        for (int t = 1; t <= steps; ++t) {
            s += gen.uniform() < 0.5 ? -1 : 1;
            if (s < 0 && t < steps) return false;
        }
        return s >= params.window_lo && s <= params.window_hi;
    });
}

void WalkParams::validate() const {
    if (steps < 1) throw DomainError("steps must be >= 1");
    if (!(offset >= 0.0)) throw DomainError("offset must be >= 0");
    if (!(window_lo < window_hi))
        throw DomainError("window must satisfy lo < hi");
    if (start > offset)
        throw DomainError("start already above the barrier line");
}

McEstimate barrier_estimate(const WalkParams& params, std::size_t samples,
                            BarrierMethod method, std::uint64_t seed,
                            unsigned threads) {
    params.validate();
    if (samples < 100) throw DomainError("need at least 100 samples");
    const int steps = params.steps;
    const double drift = params.drift;

    if (method == BarrierMethod::direct) {
        return chunked_hits(samples, seed, threads, [&](SplitMix64& gen) {
            double s = params.start;
            for (int l = 1; l <= steps; ++l) {
                s += gen.normal();
                if (s > drift * l + params.offset) return false;
            }
            const double end = s - drift * steps;
            return end >= params.window_lo && end <= params.window_hi;
        });
    }

    // Tilted walk: drift moved onto the line, exact reweighting per hit.
    const std::size_t chunk = 4096;
    const std::size_t chunks = (samples + chunk - 1) / chunk;
    struct Acc {
        double sum = 0.0, sumsq = 0.0;
        std::uint64_t hits = 0;
    };
    const std::function<Acc(std::size_t)> run = [&](std::size_t c) {
        const std::size_t lo = c * chunk;
        const std::size_t hi = std::min(lo + chunk, samples);
        Acc acc;
        for (std::size_t i = lo; i < hi; ++i) {
            SplitMix64 gen(derive_seed(seed, i));
            double s = params.start;
            bool alive = true;
            for (int l = 1; l <= steps; ++l) {
                s += drift + gen.normal();
                if (s > drift * l + params.offset) {
                    alive = false;
                    break;
                }
            }
            if (!alive) continue;
            const double end = s - drift * steps;
            if (end < params.window_lo || end > params.window_hi) continue;
            const double w = std::exp(-drift * (s - params.start) +
                                      0.5 * steps * drift * drift);
            acc.sum += w;
            acc.sumsq += w * w;
            ++acc.hits;
        }
        return acc;
    };
    const auto per_chunk = parallel_map<Acc>(chunks, run, threads);
    Acc total;
    for (const auto& a : per_chunk) {
        total.sum += a.sum;
        total.sumsq += a.sumsq;
        total.hits += a.hits;
    }
    McEstimate e;
    e.samples = samples;
    e.hits = total.hits;
    const double n = static_cast<double>(samples);
    e.estimate = total.sum / n;
    const double var =
        std::max(0.0, total.sumsq / n - e.estimate * e.estimate);
    e.se = std::sqrt(var / n);
    e.unreliable = total.hits < 10;
    return e;
}

void GammaParams::validate() const {
    FieldParams{depth, 0}.validate();
    if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
}

namespace {

bool crossing_exists(const IncrementOracle& field, NodeRef node, double sum,
                     double slope, double level) {
    if (node.depth >= 1 &&
        sum >= slope * static_cast<double>(node.depth) + level)
        return true;
    if (node.depth == field.params().depth) return false;
    const NodeRef c0 = node.child(0), c1 = node.child(1);
    return crossing_exists(field, c0, sum + field.increment(c0), slope, level) ||
           crossing_exists(field, c1, sum + field.increment(c1), slope, level);
}

} // namespace

McEstimate gamma_event_estimate(const GammaParams& params,
                                std::size_t replicates, std::uint64_t seed,
                                unsigned threads) {
    params.validate();
    const double slope =
        leader_centering(params.depth) / static_cast<double>(params.depth);
    const double level = params.kappa * std::log(params.depth);
    const std::function<std::uint64_t(std::size_t)> run = [&](std::size_t r) {
        const IncrementOracle field({params.depth, derive_seed(seed, r)});
        return crossing_exists(field, {0, 0}, 0.0, slope, level)
                   ? std::uint64_t{1}
                   : std::uint64_t{0};
    };
    const auto hits_per = parallel_map<std::uint64_t>(replicates, run, threads);
    McEstimate e;
    e.samples = replicates;
    for (auto h : hits_per) e.hits += h;
    const double n = static_cast<double>(replicates);
    e.estimate = static_cast<double>(e.hits) / n;
    e.se = std::sqrt(e.estimate * (1.0 - e.estimate) / n);
    e.unreliable = e.hits < 10;
    return e;
}

} // namespace brw
