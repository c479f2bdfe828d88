#pragma once

#include <bit>
#include <cstdint>

#include "brw/errors.hpp"
#include "brw/rng.hpp"

namespace brw {

// Maximum tree depth accepted anywhere in the library. Depth 26 keeps a
// full two-array table of the tree under the default 2 GiB budget.
inline constexpr int kMaxDepth = 26;

struct FieldParams {
    int depth = 0;               // levels below the root
    std::uint64_t seed = 0;

    void validate() const {
        if (depth < 1 || depth > kMaxDepth)
            throw DomainError("field depth must lie in [1, " +
                              std::to_string(kMaxDepth) + "], got " +
                              std::to_string(depth));
    }
};

// A vertex of the rooted binary tree. depth 0, index 0 is the root;
// at depth d the index runs over [0, 2^d).
struct NodeRef {
    int depth = 0;
    std::uint64_t index = 0;

    // Heap numbering: root is 1, children of id k are 2k and 2k+1.
    std::uint64_t id() const noexcept {
        return (std::uint64_t{1} << depth) + index;
    }

    NodeRef parent() const noexcept { return {depth - 1, index >> 1}; }
    NodeRef child(int bit) const noexcept {
        return {depth + 1, (index << 1) | static_cast<std::uint64_t>(bit)};
    }

    // Ancestor at depth d <= depth.
    NodeRef ancestor(int d) const noexcept {
        return {d, index >> (depth - d)};
    }

    bool operator==(const NodeRef&) const = default;
};

// Depth of the deepest common ancestor of two nodes at equal depth.
inline int lca_depth(NodeRef v, NodeRef w) noexcept {
    const std::uint64_t x = v.index ^ w.index;
    return x == 0 ? v.depth : v.depth - std::bit_width(x);
}

// Standard Gaussian attached to every non-root vertex, evaluated on demand
// as a pure function of (seed, vertex id). Nothing is stored, so two
// oracles with the same params agree everywhere, in any evaluation order.
class IncrementOracle {
public:
    explicit IncrementOracle(FieldParams params)
        : params_(params), gen_(params.seed) {
        params_.validate();
    }

    const FieldParams& params() const noexcept { return params_; }

    double increment(NodeRef node) const {
        if (node.depth < 1)
            throw DomainError("root has no increment");
        if (node.depth > params_.depth)
            throw DomainError("node depth " + std::to_string(node.depth) +
                              " exceeds field depth " +
                              std::to_string(params_.depth));
        return gen_.normal_at(node.id());
    }

    // Sum of increments along the root-to-leaf path, cut at depth `upto`.
    // upto defaults to the full depth; upto = 0 gives 0.
    double path_sum(NodeRef leaf, int upto = -1) const {
        if (leaf.depth != params_.depth)
            throw DomainError("path_sum expects a leaf at depth " +
                              std::to_string(params_.depth));
        if (upto < 0) upto = params_.depth;
        if (upto > params_.depth)
            throw DomainError("path_sum cut exceeds field depth");
        double s = 0.0;
        for (int d = 1; d <= upto; ++d)
            s += increment(leaf.ancestor(d));
        return s;
    }

private:
    FieldParams params_;
    SplitMix64 gen_;
};

} // namespace brw
