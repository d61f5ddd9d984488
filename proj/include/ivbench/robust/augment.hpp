#pragma once

#include <span>
#include <vector>

#include "ivbench/core/matrix.hpp"
#include "ivbench/core/random.hpp"
#include "ivbench/iv/perturbation.hpp"

namespace ivbench::robust {

struct AugmentedSet {
    Matrix X;
    std::vector<int> y;
};

// n perturbed copies of every row, drawn with iv::perturb; the originals are
// not included. Copies of row i occupy rows [i*n, (i+1)*n).
AugmentedSet augment(const Matrix& X, std::span<const int> y, const iv::CVProfile& profile, std::size_t n,
                     Rng& rng, const iv::PerturbOptions& opts = {});

}  // namespace ivbench::robust
