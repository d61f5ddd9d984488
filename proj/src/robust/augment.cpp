#include "ivbench/robust/augment.hpp"

#include <algorithm>

#include "ivbench/core/error.hpp"

namespace ivbench::robust {

AugmentedSet augment(const Matrix& X, std::span<const int> y, const iv::CVProfile& profile, std::size_t n,
                     Rng& rng, const iv::PerturbOptions& opts) {
    if (n == 0) throw ValidationError("augmentation count must be >= 1");
    if (X.rows() != y.size()) throw ValidationError("row count and label count differ");
    AugmentedSet out;
    out.X = Matrix(X.rows() * n, X.cols());
    out.y.reserve(X.rows() * n);
    std::size_t r = 0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t c = 0; c < n; ++c, ++r) {
            const auto p = iv::perturb(X.row(i), y[i], profile, rng, opts);
            std::copy(p.begin(), p.end(), out.X.row(r).begin());
            out.y.push_back(y[i]);
        }
    }
    return out;
}

}  // namespace ivbench::robust
