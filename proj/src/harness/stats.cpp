#include "ivbench/harness/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ivbench/core/error.hpp"

namespace ivbench::harness {

double quantile(std::span<const double> samples, double q) {
    if (samples.empty()) throw ValidationError("quantile of an empty sample");
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, s.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return s[lo] + frac * (s[hi] - s[lo]);
}

Interval percentile_interval(std::span<const double> samples, double level) {
    if (samples.size() < 2) throw ValidationError("a confidence interval needs at least 2 samples");
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0, 1)");
    const double tail = (1.0 - level) / 2.0;
    return {quantile(samples, tail), quantile(samples, 1.0 - tail)};
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    // The alternating series is 1 to double precision below this point.
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum)) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha) {
    if (a.empty() || b.empty()) throw ValidationError("KS test needs two non-empty samples");
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double n = static_cast<double>(x.size());
    const double m = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    // Advance past every copy of the smallest pending value before comparing.
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    KsResult r;
    r.statistic = d;
    const double ne = std::sqrt(n * m / (n + m));
    r.p_value = kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d);
    r.reject = r.p_value < alpha;
    return r;
}

}  // namespace ivbench::harness
