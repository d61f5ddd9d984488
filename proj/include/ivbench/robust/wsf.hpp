#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ivbench/learn/tree.hpp"
#include "ivbench/robust/imprecise.hpp"

namespace ivbench::robust {

struct OobRecord {
    double error_rate = 0.0;
    std::size_t sample_size = 0;
};

// Weighted re-sampling forest: per tree, bootstrap the imprecise training set,
// realize every drawn instance with one alpha-cut sample, and grow one
// extremely randomized tree on the realization.
class WsfEnsemble {
public:
    struct Options {
        std::size_t n_estimators = 100;
        bool bootstrap = true;
        // Extremely randomized tree: random thresholds, sqrt(d) candidates
        // (max_features 0 is resolved to sqrt(d) at fit time), unbounded depth.
        learn::TreeOptions tree{0, 2, 1, 0, learn::SplitStrategy::random};
    };

    static WsfEnsemble fit(std::span<const ImpreciseInstance> train, const Options& opts, std::uint64_t seed);

    // Seed of tree t's realization stream (bootstrap and tree streams are
    // shared with learn::VotingForest).
    static std::uint64_t realization_seed(std::uint64_t seed, std::size_t t);

    std::size_t dimension() const noexcept { return dim_; }
    std::size_t size() const noexcept { return trees_.size(); }
    const std::vector<learn::DecisionTree>& trees() const noexcept { return trees_; }
    const std::vector<std::uint64_t>& tree_seeds() const noexcept { return tree_seeds_; }
    // Training indices not drawn into tree t's bootstrap sample.
    const std::vector<std::size_t>& out_of_bag(std::size_t t) const { return oob_[t]; }

    // Share of trees voting 1; predict() breaks a tie towards class 0.
    double score(std::span<const double> x) const;
    int predict(std::span<const double> x) const { return score(x) > 0.5 ? 1 : 0; }
    // Imprecise queries are evaluated at their centers.
    double score(const ImpreciseInstance& q) const { return score(q.center); }
    int predict(const ImpreciseInstance& q) const { return predict(q.center); }
    std::vector<double> score(std::span<const ImpreciseInstance> queries) const;
    std::vector<int> predict(std::span<const ImpreciseInstance> queries) const;

    // Per-tree 0-1 error on its out-of-bag centers.
    std::vector<OobRecord> per_tree_oob(std::span<const ImpreciseInstance> train) const;
    // Majority vote of the out-of-bag trees per training instance; instances
    // that are never out of bag are skipped.
    double oob_error(std::span<const ImpreciseInstance> train) const;

private:
    std::size_t dim_ = 0;
    std::vector<learn::DecisionTree> trees_;
    std::vector<std::uint64_t> tree_seeds_;
    std::vector<std::vector<std::size_t>> oob_;
};

}  // namespace ivbench::robust
