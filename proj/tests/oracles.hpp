#pragma once

// Reference implementations used only by tests. Everything here takes the
// slow road on purpose: direct enumeration over leaves, closed forms, or
// dense quadrature, sharing no logic with the library code under test.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "brw/barrier.hpp"
#include "brw/cascade.hpp"
#include "brw/field.hpp"

namespace oracle {

using Inc = std::function<double(brw::NodeRef)>;

// Path sum of every leaf, index = leaf position at the bottom level.
inline std::vector<double> leaf_sums(int depth, const Inc& inc) {
    const std::size_t leaves = std::size_t{1} << depth;
    std::vector<double> sums(leaves, 0.0);
    for (std::size_t i = 0; i < leaves; ++i)
        for (int d = 1; d <= depth; ++d)
            sums[i] += inc({d, i >> (depth - d)});
    return sums;
}

inline double log_sum_exp(const std::vector<double>& xs) {
    double mx = xs.front();
    for (double x : xs) mx = std::max(mx, x);
    double s = 0.0;
    for (double x : xs) s += std::exp(x - mx);
    return mx + std::log(s);
}

inline double log_partition(int depth, double beta, const Inc& inc) {
    std::vector<double> sums = leaf_sums(depth, inc);
    for (double& s : sums) s *= beta;
    return log_sum_exp(sums);
}

inline std::vector<double> leaf_masses(int depth, double beta, const Inc& inc) {
    const std::vector<double> sums = leaf_sums(depth, inc);
    std::vector<double> scaled(sums);
    for (double& s : scaled) s *= beta;
    const double lz = log_sum_exp(scaled);
    std::vector<double> w(sums.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(scaled[i] - lz);
    return w;
}

inline int leaf_lca_depth(int depth, std::size_t a, std::size_t b) {
    int d = depth;
    while (a != b) {
        a >>= 1;
        b >>= 1;
        --d;
    }
    return d;
}

// tail[d] = P(two independent Gibbs leaves agree to depth >= d).
inline std::vector<double> overlap_tail(int depth,
                                        const std::vector<double>& masses) {
    std::vector<double> tail(depth + 1, 0.0);
    for (std::size_t a = 0; a < masses.size(); ++a)
        for (std::size_t b = 0; b < masses.size(); ++b) {
            const int l = leaf_lca_depth(depth, a, b);
            for (int d = 0; d <= l; ++d) tail[d] += masses[a] * masses[b];
        }
    return tail;
}

inline double mean_energy(int depth, const Inc& inc,
                          const std::vector<double>& masses) {
    const std::vector<double> sums = leaf_sums(depth, inc);
    double e = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) e += masses[i] * sums[i];
    return e;
}

// E<R12^p1 R13^p2> by triple enumeration.
inline double mixed_moment(int depth, const std::vector<double>& masses,
                           int p1, int p2) {
    const double n = depth;
    double total = 0.0;
    for (std::size_t a = 0; a < masses.size(); ++a) {
        for (std::size_t b = 0; b < masses.size(); ++b) {
            const double r12 = leaf_lca_depth(depth, a, b) / n;
            const double w12 = masses[a] * masses[b] * std::pow(r12, p1);
            if (w12 == 0.0) continue;
            for (std::size_t c = 0; c < masses.size(); ++c) {
                const double r13 = leaf_lca_depth(depth, a, c) / n;
                total += w12 * masses[c] * std::pow(r13, p2);
            }
        }
    }
    return total;
}

inline double leader(int depth, const Inc& inc) {
    const std::vector<double> sums = leaf_sums(depth, inc);
    double mx = sums.front();
    for (double s : sums) mx = std::max(mx, s);
    return mx;
}

inline double rising(double x, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= x + i;
    return v;
}

inline double factorial(int k) {
    double v = 1.0;
    for (int i = 2; i <= k; ++i) v *= i;
    return v;
}

// Closed-form sampling formula for the block sizes of a random cascade
// partition: alpha^(k-1) (k-1)! / (n-1)! * prod_b rising(1 - alpha, m_b - 1)
// with alpha = 1 - mu1.
inline double pattern_prob_closed_form(const brw::Pattern& pattern, double mu1) {
    const std::vector<int> sizes = pattern.block_sizes();
    const int k = static_cast<int>(sizes.size());
    int n = 0;
    for (int m : sizes) n += m;
    const double alpha = 1.0 - mu1;
    double p = std::pow(alpha, k - 1) * factorial(k - 1) / factorial(n - 1);
    for (int m : sizes) p *= rising(mu1, m - 1);
    return p;
}

// Exact hit probability for the +-1 walk held nonnegative strictly inside
// (0, n) with endpoint in [lo, hi], by dynamic programming on offsets.
inline double ballot_exact(int n, int start, int lo, int hi) {
    const int width = start + n + 1;  // reachable nonnegative values
    std::vector<double> cur(width, 0.0), next(width, 0.0);
    cur[start] = 1.0;
    for (int t = 1; t <= n; ++t) {
        std::fill(next.begin(), next.end(), 0.0);
        const bool interior = t < n;
        for (int s = 0; s < width; ++s) {
            if (cur[s] == 0.0) continue;
            for (int step : {-1, 1}) {
                const int v = s + step;
                if (v < 0 && interior) continue;  // absorbed below zero
                if (v < 0 || v >= width) continue;
                next[v] += 0.5 * cur[s];
            }
        }
        cur.swap(next);
    }
    double p = 0.0;
    for (int s = std::max(lo, 0); s <= std::min(hi, width - 1); ++s)
        p += cur[s];
    return p;
}

// Dense density propagation for the sloped-barrier walk event, in the
// line frame y(l) = S(l) - drift * l: increments are normal with mean
// -drift, the constraint is y <= offset, and the endpoint window applies
// to y(steps) directly.
inline double barrier_quadrature(const brw::WalkParams& p, double du = 0.02) {
    const double lo = -12.0 * std::sqrt(static_cast<double>(p.steps)) - 4.0;
    const int cells = static_cast<int>((p.offset - lo) / du) + 1;
    auto y_at = [&](int i) { return lo + i * du; };

    const double kw = 7.0 + std::abs(p.drift);
    const int hw = static_cast<int>(kw / du);
    std::vector<double> kernel(2 * hw + 1);
    for (int j = -hw; j <= hw; ++j) {
        const double x = j * du + p.drift;  // increment mean is -drift
        kernel[j + hw] =
            std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI) * du;
    }

    std::vector<double> v(cells, 0.0), w(cells, 0.0);
    for (int i = 0; i < cells; ++i) {
        const double x = y_at(i) - p.start + p.drift;
        v[i] = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    }
    for (int l = 2; l <= p.steps; ++l) {
        std::fill(w.begin(), w.end(), 0.0);
        for (int i = 0; i < cells; ++i) {
            if (v[i] == 0.0) continue;
            const int jlo = std::max(0, i - hw), jhi = std::min(cells - 1, i + hw);
            for (int j = jlo; j <= jhi; ++j)
                w[j] += v[i] * kernel[j - i + hw];
        }
        v.swap(w);
    }
    double total = 0.0;
    for (int i = 0; i < cells; ++i) {
        const double y = y_at(i);
        if (y >= p.window_lo && y <= p.window_hi) total += v[i] * du;
    }
    return total;
}

} // namespace oracle
