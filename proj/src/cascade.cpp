#include "brw/cascade.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "brw/errors.hpp"
#include "brw/parallel.hpp"

namespace brw {

void PdParams::validate() const {
    if (!(theta > 0.0) || theta > 1.0)
        throw DomainError("theta must lie in (0, 1]");
    if (max_atoms < 1) throw DomainError("max_atoms must be >= 1");
    if (!(tail_tol > 0.0) || tail_tol >= 0.5)
        throw DomainError("tail_tol must lie in (0, 0.5)");
}

double RankedWeights::sum_sq() const {
    double s = 0.0;
    for (double w : weights) s += w * w;
    return s;
}

RankedWeights pd_sample(const PdParams& params, SplitMix64& gen) {
    params.validate();
    if (params.theta == 1.0) return {{1.0}, 0.0};

    const double theta = params.theta;
    std::vector<double> atoms;
    double arrival = 0.0;
    double sum = 0.0;
    double tail = 0.0;
    for (;;) {
        arrival += gen.exponential();
        const double atom = std::pow(arrival, -1.0 / theta);
        atoms.push_back(atom);
        sum += atom;
        // Expected unnormalized mass still below this atom's level.
        tail = theta / (1.0 - theta) * std::pow(atom, 1.0 - theta);
        if (tail <= params.tail_tol * (sum + tail)) break;
        if (atoms.size() >= params.max_atoms) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "cascade cut not reached: %zu atoms, relative tail "
                          "%.3e, tolerance %.3e",
                          atoms.size(), tail / (sum + tail), params.tail_tol);
            throw TruncationError(buf);
        }
    }
    RankedWeights out;
    out.weights.resize(atoms.size());
    const double total = sum + tail;
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        out.weights[i] = atoms[i] / total;
        acc += out.weights[i];
    }
    out.tail_mass = 1.0 - acc;
    return out;
}

Pattern Pattern::parse(const std::string& text) {
    Pattern p;
    std::vector<std::vector<int>> blocks;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '{')
            throw DomainError("pattern must be blocks like {1,2}{3}, got '" +
                              text + "'");
        ++i;
        std::vector<int> block;
        while (i < text.size() && text[i] != '}') {
            if (text[i] == ',') { ++i; continue; }
            if (!std::isdigit(static_cast<unsigned char>(text[i])))
                throw DomainError("bad character in pattern '" + text + "'");
            int v = 0;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
                v = v * 10 + (text[i++] - '0');
            block.push_back(v);
        }
        if (i >= text.size())
            throw DomainError("unterminated block in pattern '" + text + "'");
        ++i;
        if (block.empty())
            throw DomainError("empty block in pattern '" + text + "'");
        blocks.push_back(std::move(block));
    }
    int n = 0;
    for (const auto& b : blocks) n += static_cast<int>(b.size());
    if (n == 0) throw DomainError("empty pattern");
    p.n = n;
    p.block_of.assign(n, -1);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (int e : blocks[b]) {
            if (e < 1 || e > n || p.block_of[e - 1] != -1)
                throw DomainError("pattern '" + text +
                                  "' must cover 1.." + std::to_string(n) +
                                  " exactly once");
            p.block_of[e - 1] = static_cast<int>(b);
        }
    }
    // Canonical order: blocks numbered by first appearance.
    std::vector<int> remap(blocks.size(), -1);
    int next = 0;
    for (int e = 0; e < n; ++e) {
        int& r = remap[p.block_of[e]];
        if (r == -1) r = next++;
        p.block_of[e] = r;
    }
    return p;
}

Pattern Pattern::singletons(int n) {
    if (n < 1) throw DomainError("pattern size must be >= 1");
    Pattern p;
    p.n = n;
    p.block_of.resize(n);
    for (int i = 0; i < n; ++i) p.block_of[i] = i;
    return p;
}

Pattern Pattern::from_overlaps(const std::vector<std::vector<double>>& overlaps,
                               double cutoff) {
    const int n = static_cast<int>(overlaps.size());
    if (n < 1) throw DomainError("empty overlap array");
    for (const auto& row : overlaps)
        if (static_cast<int>(row.size()) != n)
            throw DomainError("overlap array must be square");
    Pattern p;
    p.n = n;
    p.block_of.assign(n, -1);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            if (overlaps[j][i] >= cutoff) {
                p.block_of[i] = p.block_of[j];
                break;
            }
        }
        if (p.block_of[i] == -1) p.block_of[i] = next++;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            const bool same = p.block_of[i] == p.block_of[j];
            if (same != (overlaps[j][i] >= cutoff))
                throw DomainError("overlap relation at cutoff is not "
                                  "ultrametric: pairs disagree with the "
                                  "induced blocks");
        }
    return p;
}

std::string Pattern::to_string() const {
    std::string out;
    const int k = blocks();
    for (int b = 0; b < k; ++b) {
        out += '{';
        bool first = true;
        for (int e = 0; e < n; ++e) {
            if (block_of[e] != b) continue;
            if (!first) out += ',';
            out += std::to_string(e + 1);
            first = false;
        }
        out += '}';
    }
    return out;
}

int Pattern::blocks() const {
    int k = 0;
    for (int b : block_of) k = std::max(k, b + 1);
    return k;
}

std::vector<int> Pattern::block_sizes() const {
    std::vector<int> sizes(blocks(), 0);
    for (int b : block_of) ++sizes[b];
    return sizes;
}

std::vector<Pattern> all_patterns(int n) {
    if (n < 1 || n > 12)
        throw DomainError("pattern enumeration supports n in [1, 12]");
    std::vector<Pattern> out;
    // Restricted growth strings: a[0] = 0, a[i] <= 1 + max of the prefix.
    std::vector<int> a(n, 0);
    for (;;) {
        Pattern p;
        p.n = n;
        p.block_of = a;
        out.push_back(p);
        int i = n - 1;
        for (; i >= 1; --i) {
            int mx = 0;
            for (int j = 0; j < i; ++j) mx = std::max(mx, a[j]);
            if (a[i] <= mx) { ++a[i]; break; }
            a[i] = 0;
        }
        if (i == 0) break;
    }
    return out;
}

double pattern_prob(const Pattern& pattern, double mu1) {
    if (!(mu1 >= 0.0) || mu1 > 1.0)
        throw DomainError("mu1 must lie in [0, 1]");
    if (pattern.n < 1) throw DomainError("empty pattern");
    std::vector<int> sizes = pattern.block_sizes();
    int n = pattern.n;
    int k = static_cast<int>(sizes.size());
    double prob = 1.0;
    // Remove replicas from the last block until the pattern is a single
    // replica; order does not matter for the product.
    while (n > 1) {
        const int m = sizes.back();
        if (m >= 2) {
            prob *= (mu1 + m - 2) / static_cast<double>(n - 1);
            --sizes.back();
        } else {
            prob *= (1.0 - mu1) * (k - 1) / static_cast<double>(n - 1);
            sizes.pop_back();
            --k;
        }
        --n;
    }
    return prob;
}

std::vector<long long> draw_cluster_labels(const RankedWeights& weights, int n,
                                           const SplitMix64& gen,
                                           std::uint64_t block) {
    if (n < 1) throw DomainError("need at least one draw");
    std::vector<long long> labels(n);
    const std::uint64_t base = block * static_cast<std::uint64_t>(n);
    for (int i = 0; i < n; ++i) {
        const double u = gen.uniform_at(base + static_cast<std::uint64_t>(i));
        double acc = 0.0;
        long long label = -(static_cast<long long>(i) + 1);  // tail fallback
        for (std::size_t k = 0; k < weights.weights.size(); ++k) {
            acc += weights.weights[k];
            if (u < acc) { label = static_cast<long long>(k); break; }
        }
        labels[i] = label;
    }
    return labels;
}

std::vector<std::vector<double>> rpc_overlap_array(const RankedWeights& weights,
                                                   int n, const SplitMix64& gen,
                                                   std::uint64_t block) {
    const auto labels = draw_cluster_labels(weights, n, gen, block);
    std::vector<std::vector<double>> r(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            r[i][j] = (i == j || labels[i] == labels[j]) ? 1.0 : 0.0;
    return r;
}

PatternCensus rpc_pattern_census(const PdParams& params, int n,
                                 std::size_t realizations, std::uint64_t seed,
                                 unsigned threads, std::size_t batches) {
    params.validate();
    if (n < 1 || n > 12) throw DomainError("census supports n in [1, 12]");
    if (realizations < batches)
        throw DomainError("census needs at least one realization per batch");

    PatternCensus census;
    census.n = n;
    census.realizations = realizations;
    census.patterns = all_patterns(n);

    // Index patterns by their block string for the tally.
    const std::size_t np = census.patterns.size();
    const std::function<std::vector<std::uint32_t>(std::size_t)> chunk =
        [&](std::size_t b) {
            std::vector<std::uint32_t> counts(np, 0);
            const std::size_t lo = realizations * b / batches;
            const std::size_t hi = realizations * (b + 1) / batches;
            for (std::size_t r = lo; r < hi; ++r) {
                SplitMix64 gen(derive_seed(seed, r));
                const RankedWeights w = pd_sample(params, gen);
                // Draw labels from a separate counter block so atom count
                // does not shift the draw stream.
                SplitMix64 picks(derive_seed(seed, r ^ 0x9e3779b97f4a7c15ULL));
                const auto labels = draw_cluster_labels(w, n, picks, 0);
                Pattern induced;
                induced.n = n;
                induced.block_of.assign(n, -1);
                int next = 0;
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < i; ++j)
                        if (labels[j] == labels[i]) {
                            induced.block_of[i] = induced.block_of[j];
                            break;
                        }
                    if (induced.block_of[i] == -1) induced.block_of[i] = next++;
                }
                for (std::size_t pi = 0; pi < np; ++pi)
                    if (census.patterns[pi].block_of == induced.block_of) {
                        ++counts[pi];
                        break;
                    }
            }
            return counts;
        };
    const auto per_batch =
        parallel_map<std::vector<std::uint32_t>>(batches, chunk, threads);

    census.probs.resize(np);
    for (std::size_t pi = 0; pi < np; ++pi) {
        std::vector<double> freqs(batches);
        double total = 0.0;
        for (std::size_t b = 0; b < batches; ++b) {
            const std::size_t lo = realizations * b / batches;
            const std::size_t hi = realizations * (b + 1) / batches;
            freqs[b] = static_cast<double>(per_batch[b][pi]) /
                       static_cast<double>(hi - lo);
            total += static_cast<double>(per_batch[b][pi]);
        }
        Estimate e = mean_se(freqs);
        e.mean = total / static_cast<double>(realizations);
        e.n = realizations;
        census.probs[pi] = e;
    }
    return census;
}

double ClusterWeights::sum_sq() const {
    double s = 0.0;
    for (double w : weights) s += w * w;
    return s;
}

ClusterWeights cluster_weights(const PartitionTable& table, double epsilon) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw DomainError("epsilon must lie in (0, 1)");
    const int depth = table.depth();
    const int cut = static_cast<int>(
        std::ceil((1.0 - epsilon) * static_cast<double>(depth) - 1e-9));
    ClusterWeights out;
    out.cut_depth = std::max(cut, 1);
    table.sweep_log_masses(
        [&](int d, const std::vector<double>& logm) {
            if (d != out.cut_depth) return;
            out.weights.resize(logm.size());
            for (std::size_t i = 0; i < logm.size(); ++i)
                out.weights[i] = std::exp(logm[i]);
        },
        out.cut_depth);
    std::sort(out.weights.begin(), out.weights.end(), std::greater<>());
    // Drop numerically empty clusters; they carry no mass.
    while (!out.weights.empty() && out.weights.back() < 1e-300)
        out.weights.pop_back();
    return out;
}

} // namespace brw
