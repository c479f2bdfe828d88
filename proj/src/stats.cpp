#include "brw/stats.hpp"

#include <algorithm>
#include <cmath>

#include "brw/errors.hpp"

namespace brw {

Estimate mean_se(const std::vector<double>& xs) {
    if (xs.empty()) throw DomainError("mean_se needs at least one sample");
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    if (xs.size() == 1) return {mean, 0.0, 1};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    return {mean, std::sqrt(var / static_cast<double>(xs.size())), xs.size()};
}

Estimate batched_mean_se(const std::vector<double>& xs, std::size_t batches) {
    if (batches < 2) throw DomainError("batched_mean_se needs at least 2 batches");
    if (xs.size() < batches)
        return mean_se(xs);
    std::vector<double> bm(batches, 0.0);
    std::vector<std::size_t> bn(batches, 0);
    // Contiguous split; remainders go to the leading batches.
    const std::size_t base = xs.size() / batches;
    const std::size_t extra = xs.size() % batches;
    std::size_t pos = 0;
    for (std::size_t b = 0; b < batches; ++b) {
        const std::size_t len = base + (b < extra ? 1 : 0);
        for (std::size_t i = 0; i < len; ++i) bm[b] += xs[pos + i];
        bm[b] /= static_cast<double>(len);
        bn[b] = len;
        pos += len;
    }
    Estimate e = mean_se(bm);
    // Overall mean from the raw samples, not from unequal batch means.
    double sum = 0.0;
    for (double x : xs) sum += x;
    e.mean = sum / static_cast<double>(xs.size());
    e.n = xs.size();
    return e;
}

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw DomainError("fit_line needs two equal-length series of size >= 2");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) { sx += xs[i]; sy += ys[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw DomainError("fit_line: x values are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

double median(std::vector<double> xs) {
    if (xs.empty()) throw DomainError("median of empty sample");
    const std::size_t k = xs.size() / 2;
    std::nth_element(xs.begin(), xs.begin() + k, xs.end());
    if (xs.size() % 2 == 1) return xs[k];
    const double hi = xs[k];
    std::nth_element(xs.begin(), xs.begin() + k - 1, xs.end());
    return 0.5 * (xs[k - 1] + hi);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double ks_distance(std::vector<double> samples, double (*cdf)(double)) {
    if (samples.empty()) throw DomainError("ks_distance of empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

double zero_count_upper_bound(std::size_t n, double confidence) {
    if (n == 0) throw DomainError("zero_count_upper_bound needs n >= 1");
    if (confidence <= 0.0 || confidence >= 1.0)
        throw DomainError("confidence must lie in (0, 1)");
    // P(no hits) = (1-p)^n = 1-confidence at the bound.
    return 1.0 - std::pow(1.0 - confidence, 1.0 / static_cast<double>(n));
}

} // namespace brw
