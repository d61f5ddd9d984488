#pragma once

#include <nlohmann/json.hpp>
#include <span>
#include <vector>

#include "ivbench/core/matrix.hpp"
#include "ivbench/core/random.hpp"

namespace ivbench::learn {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;  // x[feature] <= threshold goes left
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf output: mean target (class-1 share for 0/1 targets)
};

class DecisionTree {
public:
    DecisionTree() = default;
    explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

    std::size_t leaf_index(std::span<const double> x) const;
    double predict_value(std::span<const double> x) const { return nodes_[leaf_index(x)].value; }
    // Hard vote of a classification tree; ties (value exactly 0.5) go to 0.
    int vote(std::span<const double> x) const { return predict_value(x) > 0.5 ? 1 : 0; }

    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    void set_leaf_value(std::size_t node, double value) { nodes_[node].value = value; }
    // Longest root-to-leaf path in edges; a single leaf has depth 0.
    int depth() const;

    nlohmann::json to_json() const;
    static DecisionTree from_json(const nlohmann::json& doc);

private:
    std::vector<TreeNode> nodes_;
};

enum class SplitStrategy {
    best,    // exhaustive search over midpoints between sorted values
    random,  // one uniform threshold in (min, max) per candidate feature
};

struct TreeOptions {
    int max_depth = 0;  // 0 = unbounded
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    std::size_t max_features = 0;  // candidate features per node; 0 = all
    SplitStrategy strategy = SplitStrategy::best;
};

struct TreeFit {
    DecisionTree tree;
    std::vector<std::size_t> leaf_of_sample;  // parallel to the `samples` argument
};

// Grows a tree on rows `samples` of X with per-sample weights, minimising the
// weighted squared error of `target` (for 0/1 targets this is proportional to
// Gini impurity). Sample-count limits use distinct samples, not weights.
TreeFit fit_tree(const Matrix& X, std::span<const double> target, std::span<const std::size_t> samples,
                 std::span<const double> weights, const TreeOptions& options, Rng& rng);

// max(1, floor(sqrt(d)))
std::size_t sqrt_features(std::size_t d);

}  // namespace ivbench::learn
