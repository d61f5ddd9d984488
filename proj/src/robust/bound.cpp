#include "ivbench/robust/bound.hpp"

#include <cmath>
#include <limits>

#include "ivbench/core/error.hpp"

namespace ivbench::robust {

namespace {

// a ln(a / b) with the 0 ln 0 = 0 convention.
double xlogy_ratio(double a, double b) {
    if (a == 0.0) return 0.0;
    if (b == 0.0) return std::numeric_limits<double>::infinity();
    return a * std::log(a / b);
}

}  // namespace

double bernoulli_kl(double a, double b) { return xlogy_ratio(a, b) + xlogy_ratio(1.0 - a, 1.0 - b); }

MajorityBound chernoff_majority_bound(double p, std::size_t n) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("error probability must be finite and >= 0");
    if (n == 0) throw ValidationError("ensemble size must be >= 1");
    MajorityBound out;
    out.p = p;
    if (p >= 0.5) {
        out.bound = 1.0;
        out.vacuous = true;
        return out;
    }
    if (p == 0.0) {
        out.bound = 0.0;
        return out;
    }
    out.bound = std::exp(-static_cast<double>(n) * bernoulli_kl(0.5, p));
    return out;
}

MajorityBound wsf_generalization_bound(std::span<const OobRecord> oob, std::size_t n, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
    double p = 0.0;
    for (const auto& rec : oob) {
        if (rec.sample_size == 0) throw ValidationError("an out-of-bag set is empty; the bound is undefined");
        const double v = static_cast<double>(rec.sample_size);
        p += rec.error_rate + std::sqrt(std::log(2.0 * v / delta) / (2.0 * v));
    }
    return chernoff_majority_bound(p, n);
}

}  // namespace ivbench::robust
