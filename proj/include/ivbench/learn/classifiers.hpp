#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ivbench/core/matrix.hpp"
#include "ivbench/learn/model.hpp"
#include "ivbench/learn/smo.hpp"
#include "ivbench/learn/standardizer.hpp"

namespace ivbench::learn {

// exp(-gamma * |a - b|^2)
double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

class SvmRbf final : public Classifier {
public:
    struct Options {
        double C = 1.0;
        double gamma = 0.0;  // <= 0 selects 1/d
        double tolerance = 1e-3;
        bool standardize = true;
    };

    static std::shared_ptr<const SvmRbf> train(const Matrix& X, std::span<const int> y, const Options& opts);
    static std::shared_ptr<const SvmRbf> load(const nlohmann::json& params);

    std::size_t dimension() const override { return dim_; }
    ScoreKind score_kind() const override { return ScoreKind::margin; }
    double score_one(std::span<const double> x) const override;
    nlohmann::json parameters() const override;

    double gamma() const noexcept { return gamma_; }
    double bias() const noexcept { return bias_; }
    std::size_t support_size() const noexcept { return support_.rows(); }
    const SmoSolution& solution() const noexcept { return solution_; }

private:
    std::size_t dim_ = 0;
    Standardizer standardizer_;
    Matrix support_;
    std::vector<double> coef_;  // alpha_i * y_i for each support vector
    double bias_ = 0.0;
    double gamma_ = 0.0;
    SmoSolution solution_;  // empty after load()
};

class LogisticRegression final : public Classifier {
public:
    struct Options {
        double C = 1.0;
        double tolerance = 1e-8;
        std::size_t max_iterations = 100;
        bool standardize = true;
    };

    static std::shared_ptr<const LogisticRegression> train(const Matrix& X, std::span<const int> y,
                                                           const Options& opts);
    static std::shared_ptr<const LogisticRegression> from_weights(std::vector<double> weights, double bias);
    static std::shared_ptr<const LogisticRegression> load(const nlohmann::json& params);

    std::size_t dimension() const override { return weights_.size(); }
    ScoreKind score_kind() const override { return ScoreKind::probability; }
    double score_one(std::span<const double> x) const override;
    nlohmann::json parameters() const override;

    const std::vector<double>& weights() const noexcept { return weights_; }
    double bias() const noexcept { return bias_; }
    // Penalized training objective after each accepted Newton step (entry 0 is
    // the starting point).
    const std::vector<double>& loss_history() const noexcept { return loss_history_; }

private:
    Standardizer standardizer_;
    std::vector<double> weights_;
    double bias_ = 0.0;
    std::vector<double> loss_history_;
};

class KNearestNeighbors final : public Classifier {
public:
    static std::shared_ptr<const KNearestNeighbors> train(const Matrix& X, std::span<const int> y, std::size_t k,
                                                          bool standardize);
    static std::shared_ptr<const KNearestNeighbors> load(const nlohmann::json& params);

    std::size_t dimension() const override { return train_.cols(); }
    ScoreKind score_kind() const override { return ScoreKind::vote_share; }
    // Fraction of the k nearest training points (Euclidean, ties by lower
    // index) labelled 1.
    double score_one(std::span<const double> x) const override;
    nlohmann::json parameters() const override;

private:
    Standardizer standardizer_;
    Matrix train_;
    std::vector<int> labels_;
    std::size_t k_ = 5;
};

class GaussianNaiveBayes final : public Classifier {
public:
    static std::shared_ptr<const GaussianNaiveBayes> train(const Matrix& X, std::span<const int> y,
                                                           double var_smoothing);
    static std::shared_ptr<const GaussianNaiveBayes> load(const nlohmann::json& params);

    std::size_t dimension() const override { return mean_[0].size(); }
    ScoreKind score_kind() const override { return ScoreKind::probability; }
    // Posterior probability of class 1.
    double score_one(std::span<const double> x) const override;
    nlohmann::json parameters() const override;

    // Posterior of each class; entries sum to 1.
    std::array<double, 2> posterior(std::span<const double> x) const;

private:
    std::array<std::vector<double>, 2> mean_;
    std::array<std::vector<double>, 2> var_;
    std::array<double, 2> log_prior_{};
};

}  // namespace ivbench::learn
