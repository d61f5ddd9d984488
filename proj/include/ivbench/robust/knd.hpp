#pragma once

#include <span>
#include <vector>

#include "ivbench/robust/imprecise.hpp"

namespace ivbench::robust {

// Variance used in place of an exactly-zero diagonal entry so the
// covariance inverse exists.
inline constexpr double kKndVarianceFloor = 1e-12;

struct KndDistance {
    double value = 0.0;
    bool regularized = false;  // a zero variance was replaced by the floor
};

// Squared Mahalanobis-type distance (c1 - c2)^T M (c1 - c2) with
// M = (S1^-1 + S2^-1) / 2 and S = diag(scale^2).
KndDistance knd_distance(const ImpreciseInstance& a, const ImpreciseInstance& b);

// k-nearest-distributions classifier; score = share of the k nearest
// training instances labelled 1, ties in distance broken by lower index.
class KndClassifier {
public:
    static KndClassifier fit(std::vector<ImpreciseInstance> train, std::size_t k);

    std::vector<std::size_t> neighbors(const ImpreciseInstance& query) const;
    double score(const ImpreciseInstance& query) const;
    int predict(const ImpreciseInstance& query) const { return score(query) > 0.5 ? 1 : 0; }

    std::vector<double> score(std::span<const ImpreciseInstance> queries) const;
    std::vector<int> predict(std::span<const ImpreciseInstance> queries) const;

    std::size_t k() const noexcept { return k_; }
    std::size_t size() const noexcept { return train_.size(); }

private:
    std::vector<ImpreciseInstance> train_;
    std::vector<std::vector<double>> inv_var_;
    std::size_t k_ = 5;
};

}  // namespace ivbench::robust
