#include "brw/gibbs.hpp"

#include <cmath>
#include <string>

#include "brw/parallel.hpp"

namespace brw {

namespace {

double lse2(double a, double b) {
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

} // namespace

void GibbsParams::validate() const {
    if (depth < 1 || depth > kMaxDepth)
        throw DomainError("depth must lie in [1, " + std::to_string(kMaxDepth) +
                          "], got " + std::to_string(depth));
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw DomainError("beta must be finite and >= 0");
}

double free_energy_limit(double beta) {
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw DomainError("beta must be finite and >= 0");
    if (beta <= kBetaCritical) return std::log(2.0) + 0.5 * beta * beta;
    return kBetaCritical * beta;
}

PartitionTable PartitionTable::build(const GibbsParams& params,
                                     std::size_t memory_budget) {
    params.validate();
    const IncrementOracle field({params.depth, params.seed});
    return build_with(
        params.depth, params.beta,
        [&field](NodeRef node) { return field.increment(node); },
        memory_budget);
}

PartitionTable PartitionTable::build_with(
    int depth, double beta,
    const std::function<double(NodeRef)>& increment_fn,
    std::size_t memory_budget) {
    GibbsParams{depth, beta, 0}.validate();
    const std::size_t ids = std::size_t{1} << (depth + 1);
    const std::size_t need = 2 * ids * sizeof(double);
    if (need > memory_budget)
        throw ResourceError("partition table at depth " + std::to_string(depth) +
                            " needs " + std::to_string(need) +
                            " bytes, budget is " + std::to_string(memory_budget));

    PartitionTable t;
    t.depth_ = depth;
    t.beta_ = beta;
    t.incs_.assign(ids, 0.0);
    t.values_.assign(ids, 0.0);

    for (int d = 1; d <= depth; ++d) {
        const std::uint64_t width = std::uint64_t{1} << d;
        for (std::uint64_t i = 0; i < width; ++i)
            t.incs_[width + i] = increment_fn({d, i});
    }
    // Leaves keep value 0; combine children bottom-up.
    for (std::size_t id = (ids >> 1) - 1; id >= 1; --id) {
        const std::size_t l = 2 * id, r = 2 * id + 1;
        t.values_[id] = lse2(beta * t.incs_[l] + t.values_[l],
                             beta * t.incs_[r] + t.values_[r]);
    }
    return t;
}

double PartitionTable::increment(NodeRef node) const {
    if (node.depth < 1) throw DomainError("root has no increment");
    if (node.depth > depth_) throw DomainError("node below table depth");
    return incs_[node.id()];
}

double PartitionTable::subtree_value(NodeRef node) const {
    if (node.depth < 0 || node.depth > depth_)
        throw DomainError("node outside table");
    return values_[node.id()];
}

double PartitionTable::path_sum(NodeRef node) const {
    double s = 0.0;
    for (int d = node.depth; d >= 1; --d) {
        s += incs_[node.ancestor(d).id()];
    }
    return s;
}

double PartitionTable::log_mass(NodeRef node) const {
    return beta_ * path_sum(node) + subtree_value(node) - values_[1];
}

double PartitionTable::mass(NodeRef node) const {
    return std::exp(log_mass(node));
}

void PartitionTable::sweep_log_masses(
    const std::function<void(int, const std::vector<double>&)>& visit,
    int max_depth) const {
    const int last = max_depth < 0 ? depth_ : std::min(max_depth, depth_);
    std::vector<double> cur{0.0}, next;
    visit(0, cur);
    for (int d = 1; d <= last; ++d) {
        const std::size_t width = std::size_t{1} << d;
        next.resize(width);
        for (std::size_t i = 0; i < width; ++i) {
            const std::size_t id = width + i;
            // log m(child) = log m(parent) + beta g(child)
            //              + value(child) - value(parent)
            next[i] = cur[i >> 1] + beta_ * incs_[id] + values_[id] -
                      values_[id >> 1];
        }
        cur.swap(next);
        visit(d, cur);
    }
}

double PartitionTable::mean_energy() const {
    double total = 0.0;
    sweep_log_masses([&](int d, const std::vector<double>& logm) {
        if (d == 0) return;
        const std::size_t width = std::size_t{1} << d;
        double level = 0.0;
        for (std::size_t i = 0; i < width; ++i)
            level += incs_[width + i] * std::exp(logm[i]);
        total += level;
    });
    return total;
}

double PartitionTable::mixed_overlap_moment(int p1, int p2) const {
    if (p1 < 1 || p2 < 1) throw DomainError("moment orders must be >= 1");
    const double n = static_cast<double>(depth_);
    // Per-depth jumps of (d/N)^p.
    std::vector<double> jump1(depth_ + 1, 0.0), jump2(depth_ + 1, 0.0);
    for (int d = 1; d <= depth_; ++d) {
        jump1[d] = std::pow(d / n, p1) - std::pow((d - 1) / n, p1);
        jump2[d] = std::pow(d / n, p2) - std::pow((d - 1) / n, p2);
    }

    // a[i], b[i]: jump-weighted sums of ancestor masses. At a leaf v these
    // are <R(v, .)^p1> and <R(v, .)^p2> over a fresh Gibbs draw.
    std::vector<double> a{0.0}, b{0.0}, an, bn;
    double result = 0.0;
    sweep_log_masses([&](int d, const std::vector<double>& logm) {
        if (d == 0) return;
        const std::size_t width = std::size_t{1} << d;
        an.resize(width);
        bn.resize(width);
        for (std::size_t i = 0; i < width; ++i) {
            const double m = std::exp(logm[i]);
            an[i] = a[i >> 1] + jump1[d] * m;
            bn[i] = b[i >> 1] + jump2[d] * m;
        }
        a.swap(an);
        b.swap(bn);
        if (d == depth_) {
            for (std::size_t i = 0; i < width; ++i)
                result += std::exp(logm[i]) * a[i] * b[i];
        }
    });
    return result;
}

NodeRef PartitionTable::sample_leaf(const SplitMix64& gen,
                                    std::uint64_t draw_index) const {
    NodeRef node{0, 0};
    const std::uint64_t base =
        draw_index * static_cast<std::uint64_t>(depth_);
    for (int d = 0; d < depth_; ++d) {
        const NodeRef c0 = node.child(0), c1 = node.child(1);
        const double x0 = beta_ * incs_[c0.id()] + values_[c0.id()];
        const double x1 = beta_ * incs_[c1.id()] + values_[c1.id()];
        const double p0 = 1.0 / (1.0 + std::exp(x1 - x0));
        const double u = gen.uniform_at(base + static_cast<std::uint64_t>(d));
        node = u < p0 ? c0 : c1;
    }
    return node;
}

namespace {

double stream_value(const IncrementOracle& field, double beta, NodeRef node) {
    if (node.depth == field.params().depth) return 0.0;
    const NodeRef c0 = node.child(0), c1 = node.child(1);
    return lse2(beta * field.increment(c0) + stream_value(field, beta, c0),
                beta * field.increment(c1) + stream_value(field, beta, c1));
}

} // namespace

double log_partition_streaming(const GibbsParams& params) {
    params.validate();
    const IncrementOracle field({params.depth, params.seed});
    return stream_value(field, params.beta, {0, 0});
}

FreeEnergyEstimate free_energy(int depth, double beta, std::size_t replicates,
                               std::uint64_t seed, unsigned threads) {
    GibbsParams{depth, beta, 0}.validate();
    if (replicates < 2)
        throw DomainError("free_energy needs at least 2 replicates");
    const std::function<double(std::size_t)> one = [&](std::size_t r) {
        const GibbsParams p{depth, beta, derive_seed(seed, r)};
        return log_partition_streaming(p) / static_cast<double>(depth);
    };
    FreeEnergyEstimate est;
    est.depth = depth;
    est.beta = beta;
    est.per_replicate = parallel_map<double>(replicates, one, threads);
    est.value = mean_se(est.per_replicate);
    return est;
}

double OverlapLaw::atom(int d) const {
    if (d < 0 || d > depth) throw DomainError("atom index outside [0, depth]");
    const double upper = d == depth ? 0.0 : tail[d + 1];
    return tail[d] - upper;
}

double OverlapLaw::mean() const {
    double s = 0.0;
    for (int d = 1; d <= depth; ++d) s += tail[d];
    return s / static_cast<double>(depth);
}

double OverlapLaw::moment(int p) const {
    if (p < 1) throw DomainError("moment order must be >= 1");
    const double n = static_cast<double>(depth);
    double s = 0.0;
    for (int d = 1; d <= depth; ++d)
        s += (std::pow(d / n, p) - std::pow((d - 1) / n, p)) * tail[d];
    return s;
}

double OverlapLaw::mass_range(int dlo, int dhi) const {
    dlo = std::max(dlo, 0);
    dhi = std::min(dhi, depth);
    double s = 0.0;
    for (int d = dlo; d <= dhi; ++d) s += atom(d);
    return s;
}

double OverlapLaw::mass_low() const {
    // Largest d with d/N <= 1/4.
    return mass_range(0, depth / 4);
}

double OverlapLaw::mass_mid() const {
    return 1.0 - mass_low() - mass_high();
}

double OverlapLaw::mass_high() const {
    // Smallest d with d/N >= 3/4.
    const int dlo = (3 * depth + 3) / 4;
    return mass_range(dlo, depth);
}

OverlapLaw overlap_law_exact(const PartitionTable& table) {
    OverlapLaw law;
    law.depth = table.depth();
    law.tail.assign(law.depth + 1, 0.0);
    table.sweep_log_masses([&](int d, const std::vector<double>& logm) {
        double s = 0.0;
        for (double lm : logm) s += std::exp(2.0 * lm);
        law.tail[d] = s;
    });
    return law;
}

OverlapLaw average_overlap_laws(const std::vector<OverlapLaw>& laws) {
    if (laws.empty()) throw DomainError("no laws to average");
    OverlapLaw out;
    out.depth = laws.front().depth;
    out.tail.assign(out.depth + 1, 0.0);
    for (const auto& law : laws) {
        if (law.depth != out.depth)
            throw DomainError("laws with mixed depths cannot be averaged");
        for (int d = 0; d <= out.depth; ++d) out.tail[d] += law.tail[d];
    }
    for (double& t : out.tail) t /= static_cast<double>(laws.size());
    return out;
}

namespace {

double stream_max(const IncrementOracle& field, NodeRef node, double sum) {
    if (node.depth == field.params().depth) return sum;
    const NodeRef c0 = node.child(0), c1 = node.child(1);
    const double m0 = stream_max(field, c0, sum + field.increment(c0));
    const double m1 = stream_max(field, c1, sum + field.increment(c1));
    return m0 > m1 ? m0 : m1;
}

} // namespace

double leader_max_streaming(const IncrementOracle& field) {
    return stream_max(field, {0, 0}, 0.0);
}

} // namespace brw
