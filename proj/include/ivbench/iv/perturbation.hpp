#pragma once

#include <span>
#include <vector>

#include "ivbench/core/matrix.hpp"
#include "ivbench/core/random.hpp"
#include "ivbench/iv/profile.hpp"

namespace ivbench::iv {

struct PerturbOptions {
    // Use the elementwise max CVI over classes instead of the instance label.
    bool class_agnostic = false;
    // Clamp perturbed values at zero (lab measurands are non-negative).
    bool clip_nonnegative = false;
};

// Per-feature standard deviation of the IV distribution around x:
// sigma_j = |x_j| * sqrt(CVA_j^2 + CVI_{y,j}^2). The covariance is diag(sigma^2).
std::vector<double> build_sigma(std::span<const double> x, int y, const CVProfile& profile,
                                const PerturbOptions& opts = {});

// One draw from N(x, diag(sigma^2)). Features are sampled independently in
// index order from `rng`; the label is not an output and is never altered.
std::vector<double> perturb(std::span<const double> x, int y, const CVProfile& profile, Rng& rng,
                            const PerturbOptions& opts = {});

// Row-wise perturb() of a whole matrix, one draw per row in row order.
Matrix perturb_rows(const Matrix& X, std::span<const int> y, const CVProfile& profile, Rng& rng,
                    const PerturbOptions& opts = {});

}  // namespace ivbench::iv
