#pragma once

#include <span>

namespace ivbench::harness {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Linear-interpolation quantile (type 7) of unsorted samples, q in [0, 1].
double quantile(std::span<const double> samples, double q);

// Percentile interval at (1 - level)/2 and 1 - (1 - level)/2. Needs >= 2 samples.
Interval percentile_interval(std::span<const double> samples, double level);

// Robustness verdict: the two intervals share at least one point.
inline bool intervals_overlap(const Interval& a, const Interval& b) { return a.lo <= b.hi && b.lo <= a.hi; }

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool reject = false;
};

// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

// Two-sample Kolmogorov-Smirnov test. The statistic is sup |F1 - F2| over the
// pooled sample; the p-value uses the asymptotic Kolmogorov distribution at
// (sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) * D with ne = n m / (n + m).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha = 0.01);

}  // namespace ivbench::harness
