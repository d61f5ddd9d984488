#include "ivbench/iv/perturbation.hpp"

#include <algorithm>
#include <cmath>

#include "ivbench/core/error.hpp"

namespace ivbench::iv {

std::vector<double> build_sigma(std::span<const double> x, int y, const CVProfile& profile,
                                const PerturbOptions& opts) {
    if (x.size() != profile.dimension()) {
        throw ValidationError("feature vector has " + std::to_string(x.size()) +
                              " entries but the profile covers " + std::to_string(profile.dimension()));
    }
    if (!profile.has_class(y)) {
        throw ValidationError("profile has no CVI entry for class " + std::to_string(y));
    }
    const auto cvt = opts.class_agnostic ? profile.class_agnostic_total_cv() : profile.total_cv(y);
    std::vector<double> sigma(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) sigma[j] = std::abs(x[j]) * cvt[j];
    return sigma;
}

std::vector<double> perturb(std::span<const double> x, int y, const CVProfile& profile, Rng& rng,
                            const PerturbOptions& opts) {
    const auto sigma = build_sigma(x, y, profile, opts);
    std::vector<double> out(x.begin(), x.end());
    for (std::size_t j = 0; j < out.size(); ++j) {
        // Always consume a draw so the stream position is independent of sigma.
        const double z = standard_normal(rng);
        if (sigma[j] > 0.0) out[j] += sigma[j] * z;
        if (opts.clip_nonnegative) out[j] = std::max(out[j], 0.0);
    }
    return out;
}

Matrix perturb_rows(const Matrix& X, std::span<const int> y, const CVProfile& profile, Rng& rng,
                    const PerturbOptions& opts) {
    if (X.rows() != y.size()) throw ValidationError("row count and label count differ");
    Matrix out(X.rows(), X.cols());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto p = perturb(X.row(i), y[i], profile, rng, opts);
        std::copy(p.begin(), p.end(), out.row(i).begin());
    }
    return out;
}

}  // namespace ivbench::iv
