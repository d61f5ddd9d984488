#pragma once

#include <span>

#include "ivbench/robust/wsf.hpp"

namespace ivbench::robust {

// KL(a || b) between Bernoulli(a) and Bernoulli(b); infinite when b is 0 or 1
// and a is not.
double bernoulli_kl(double a, double b);

struct MajorityBound {
    double bound = 1.0;
    double p = 0.0;
    bool vacuous = false;  // p >= 1/2: nothing better than 1 can be said
};

// Chernoff bound exp(-n KL(1/2 || p)) on the probability that at least half
// of n independent base models with error p err.
MajorityBound chernoff_majority_bound(double p, std::size_t n);

// p = sum_i [ L_i + sqrt(ln(2 |V_i| / delta) / (2 |V_i|)) ] over the
// out-of-bag records, then chernoff_majority_bound(p, n).
MajorityBound wsf_generalization_bound(std::span<const OobRecord> oob, std::size_t n, double delta);

}  // namespace ivbench::robust
