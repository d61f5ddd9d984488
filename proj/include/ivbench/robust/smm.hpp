#pragma once

#include <span>
#include <vector>

#include "ivbench/core/matrix.hpp"
#include "ivbench/learn/smo.hpp"
#include "ivbench/robust/imprecise.hpp"

namespace ivbench::robust {

// Log of the expected RBF kernel between N(c1, S1) and N(c2, S2):
//   -1/2 D^T (S1 + S2 + I/gamma)^-1 D - 1/2 log det(gamma S1 + gamma S2 + I)
// evaluated coordinate-wise for diagonal S.
double smm_log_kernel(const ImpreciseInstance& a, const ImpreciseInstance& b, double gamma);

// exp(smm_log_kernel); lies in (0, 1].
double smm_kernel(const ImpreciseInstance& a, const ImpreciseInstance& b, double gamma);

// Support measure machine: C-SVC over the Gram matrix of smm_kernel.
class SmmClassifier {
public:
    struct Options {
        double gamma = 0.0;  // <= 0 selects 1/d
        double C = 1.0;
        double tolerance = 1e-3;
        // z-score centers and divide scales by the training SD of each feature
        bool standardize = true;
    };

    static inline constexpr double kJitter = 1e-8;

    static SmmClassifier fit(std::span<const ImpreciseInstance> train, const Options& opts);

    double decision(const ImpreciseInstance& query) const;
    int predict(const ImpreciseInstance& query) const { return decision(query) >= 0.0 ? 1 : 0; }
    std::vector<double> decision(std::span<const ImpreciseInstance> queries) const;
    std::vector<int> predict(std::span<const ImpreciseInstance> queries) const;

    double gamma() const noexcept { return gamma_; }
    // The Gram matrix failed a Cholesky check and kJitter was added to its diagonal.
    bool jittered() const noexcept { return jittered_; }
    const Matrix& gram() const noexcept { return gram_; }
    const learn::SmoSolution& solution() const noexcept { return solution_; }

private:
    ImpreciseInstance transform(const ImpreciseInstance& inst) const;

    double gamma_ = 1.0;
    std::vector<double> mean_;
    std::vector<double> sd_;
    std::vector<ImpreciseInstance> support_;
    std::vector<double> coef_;
    double bias_ = 0.0;
    bool jittered_ = false;
    Matrix gram_;
    learn::SmoSolution solution_;
};

}  // namespace ivbench::robust
