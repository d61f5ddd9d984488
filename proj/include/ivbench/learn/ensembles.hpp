#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ivbench/learn/model.hpp"
#include "ivbench/learn/tree.hpp"

namespace ivbench::learn {

// Hard-voting forest of classification trees (random forest or extra trees).
class VotingForest final : public Classifier {
public:
    struct Options {
        std::size_t n_estimators = 100;
        bool bootstrap = true;
        TreeOptions tree;
    };

    static std::shared_ptr<const VotingForest> train(const Matrix& X, std::span<const int> y, const Options& opts,
                                                     std::uint64_t seed);
    static std::shared_ptr<const VotingForest> from_trees(std::vector<DecisionTree> trees, std::size_t dimension);
    static std::shared_ptr<const VotingForest> load(const nlohmann::json& params);

    // In-bag multiplicity of each of n rows for tree `t`, as drawn by train().
    static std::vector<std::size_t> bootstrap_counts(std::uint64_t seed, std::size_t t, std::size_t n);
    // Seed of the split-randomization stream of tree `t`.
    static std::uint64_t tree_seed(std::uint64_t seed, std::size_t t);

    std::size_t dimension() const override { return dim_; }
    ScoreKind score_kind() const override { return ScoreKind::vote_share; }
    // Fraction of trees voting 1.
    double score_one(std::span<const double> x) const override;
    nlohmann::json parameters() const override;

    const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

private:
    std::size_t dim_ = 0;
    std::vector<DecisionTree> trees_;
};

// Stagewise additive logistic model of regression trees fitted to the
// negative log-loss gradient, with Newton leaf values.
class GradientBoosting final : public Classifier {
public:
    struct Options {
        std::size_t n_estimators = 100;
        double learning_rate = 0.1;
        TreeOptions tree;
    };

    static std::shared_ptr<const GradientBoosting> train(const Matrix& X, std::span<const int> y,
                                                         const Options& opts, std::uint64_t seed);
    static std::shared_ptr<const GradientBoosting> load(const nlohmann::json& params);

    std::size_t dimension() const override { return dim_; }
    ScoreKind score_kind() const override { return ScoreKind::probability; }
    double score_one(std::span<const double> x) const override;
    double raw_score(std::span<const double> x) const;
    nlohmann::json parameters() const override;

    const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
    // Training log-loss after each stage (entry 0 is the constant model).
    const std::vector<double>& train_loss() const noexcept { return train_loss_; }

private:
    std::size_t dim_ = 0;
    double init_ = 0.0;
    double learning_rate_ = 0.1;
    std::vector<DecisionTree> trees_;
    std::vector<double> train_loss_;
};

}  // namespace ivbench::learn
