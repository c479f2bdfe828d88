#pragma once

#include <cstddef>
#include <vector>

namespace brw {

// Sample mean with its standard error (sd / sqrt(n)).
struct Estimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

Estimate mean_se(const std::vector<double>& xs);

// Mean with a standard error computed from contiguous batch means.
// Guards against underestimating the error when per-sample values are
// cheap but correlated within a replicate.
Estimate batched_mean_se(const std::vector<double>& xs, std::size_t batches);

// Ordinary least squares y = slope * x + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

double median(std::vector<double> xs);

double normal_cdf(double x);

// Kolmogorov-Smirnov distance between the sample and a continuous CDF.
double ks_distance(std::vector<double> samples, double (*cdf)(double));

// One-sided upper confidence bound for a binomial proportion when zero
// successes were observed in n trials.
double zero_count_upper_bound(std::size_t n, double confidence);

} // namespace brw
