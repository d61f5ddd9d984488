#include "ivbench/learn/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ivbench/core/error.hpp"

namespace ivbench::learn {

std::size_t DecisionTree::leaf_index(std::span<const double> x) const {
    std::size_t node = 0;
    while (nodes_[node].feature >= 0) {
        const auto& n = nodes_[node];
        node = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return node;
}

int DecisionTree::depth() const {
    if (nodes_.empty()) return 0;
    std::vector<int> depth(nodes_.size(), 0);
    int deepest = 0;
    // Children are always stored after their parent.
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        deepest = std::max(deepest, depth[i]);
        if (nodes_[i].feature >= 0) {
            depth[static_cast<std::size_t>(nodes_[i].left)] = depth[i] + 1;
            depth[static_cast<std::size_t>(nodes_[i].right)] = depth[i] + 1;
        }
    }
    return deepest;
}

nlohmann::json DecisionTree::to_json() const {
    std::vector<int> feature, left, right;
    std::vector<double> threshold, value;
    for (const auto& n : nodes_) {
        feature.push_back(n.feature);
        left.push_back(n.left);
        right.push_back(n.right);
        threshold.push_back(n.threshold);
        value.push_back(n.value);
    }
    return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}};
}

DecisionTree DecisionTree::from_json(const nlohmann::json& doc) {
    const auto feature = doc.at("feature").get<std::vector<int>>();
    const auto threshold = doc.at("threshold").get<std::vector<double>>();
    const auto left = doc.at("left").get<std::vector<int>>();
    const auto right = doc.at("right").get<std::vector<int>>();
    const auto value = doc.at("value").get<std::vector<double>>();
    std::vector<TreeNode> nodes(feature.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = {feature[i], threshold[i], left[i], right[i], value[i]};
    return DecisionTree(std::move(nodes));
}

std::size_t sqrt_features(std::size_t d) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));
}

namespace {

struct Stats {
    double w = 0.0;   // total weight
    double s = 0.0;   // weighted target sum
    std::size_t count = 0;
};

// Larger is better: sum over children of S^2 / W.
double split_score(const Stats& l, const Stats& r) { return l.s * l.s / l.w + r.s * r.s / r.w; }

class Builder {
public:
    Builder(const Matrix& X, std::span<const double> target, std::span<const std::size_t> samples,
            std::span<const double> weights, const TreeOptions& opts, Rng& rng)
        : X_(X), target_(target), samples_(samples), weights_(weights), opts_(opts), rng_(rng) {
        const auto m = samples.size();
        const auto d = X.cols();
        order_.resize(d);
        for (std::size_t f = 0; f < d; ++f) {
            auto& ord = order_[f];
            ord.resize(m);
            std::iota(ord.begin(), ord.end(), std::size_t{0});
            std::stable_sort(ord.begin(), ord.end(),
                             [&](std::size_t a, std::size_t b) { return value(a, f) < value(b, f); });
        }
        goes_left_.assign(m, 0);
        scratch_.resize(m);
        leaf_of_.assign(m, 0);
        features_.resize(d);
        std::iota(features_.begin(), features_.end(), std::size_t{0});
        max_features_ = opts.max_features == 0 ? d : std::min(opts.max_features, d);
    }

    TreeFit run() {
        build(0, samples_.size(), 0);
        return {DecisionTree(std::move(nodes_)), std::move(leaf_of_)};
    }

private:
    double value(std::size_t pos, std::size_t f) const { return X_(samples_[pos], f); }

    Stats node_stats(std::size_t lo, std::size_t hi) const {
        Stats st;
        for (std::size_t i = lo; i < hi; ++i) {
            const auto p = order_[0][i];
            st.w += weights_[p];
            st.s += weights_[p] * target_[samples_[p]];
            ++st.count;
        }
        return st;
    }

    bool is_pure(std::size_t lo, std::size_t hi) const {
        const double first = target_[samples_[order_[0][lo]]];
        for (std::size_t i = lo + 1; i < hi; ++i) {
            if (target_[samples_[order_[0][i]]] != first) return false;
        }
        return true;
    }

    struct Candidate {
        bool found = false;
        std::size_t feature = 0;
        double threshold = 0.0;
        double score = 0.0;
    };

    void evaluate_best(std::size_t f, std::size_t lo, std::size_t hi, const Stats& total, Candidate& best) const {
        const auto& ord = order_[f];
        Stats left;
        const auto min_leaf = opts_.min_samples_leaf;
        for (std::size_t i = lo; i + 1 < hi; ++i) {
            const auto p = ord[i];
            left.w += weights_[p];
            left.s += weights_[p] * target_[samples_[p]];
            ++left.count;
            const double xv = value(p, f);
            const double xn = value(ord[i + 1], f);
            if (!(xn > xv)) continue;
            if (left.count < min_leaf || total.count - left.count < min_leaf) continue;
            const Stats right{total.w - left.w, total.s - left.s, total.count - left.count};
            const double sc = split_score(left, right);
            if (!best.found || sc > best.score) {
                double thr = 0.5 * (xv + xn);
                if (!(thr < xn)) thr = xv;
                best = {true, f, thr, sc};
            }
        }
    }

    void evaluate_random(std::size_t f, std::size_t lo, std::size_t hi, const Stats& total, Candidate& best) {
        const auto& ord = order_[f];
        const double mn = value(ord[lo], f);
        const double mx = value(ord[hi - 1], f);
        double thr = mn + uniform01(rng_) * (mx - mn);
        if (!(thr < mx)) thr = mn;
        Stats left;
        for (std::size_t i = lo; i < hi; ++i) {
            const auto p = ord[i];
            if (value(p, f) > thr) break;
            left.w += weights_[p];
            left.s += weights_[p] * target_[samples_[p]];
            ++left.count;
        }
        const auto min_leaf = opts_.min_samples_leaf;
        if (left.count < min_leaf || total.count - left.count < min_leaf) return;
        const Stats right{total.w - left.w, total.s - left.s, total.count - left.count};
        const double sc = split_score(left, right);
        if (!best.found || sc > best.score) best = {true, f, thr, sc};
    }

    int make_leaf(std::size_t lo, std::size_t hi, const Stats& st) {
        const auto id = static_cast<int>(nodes_.size());
        TreeNode leaf;
        leaf.value = st.w > 0.0 ? st.s / st.w : 0.0;
        nodes_.push_back(leaf);
        for (std::size_t i = lo; i < hi; ++i) leaf_of_[order_[0][i]] = static_cast<std::size_t>(id);
        return id;
    }

    int build(std::size_t lo, std::size_t hi, int depth) {
        const Stats st = node_stats(lo, hi);
        const auto count = hi - lo;
        if ((opts_.max_depth > 0 && depth >= opts_.max_depth) || count < opts_.min_samples_split ||
            count < 2 * opts_.min_samples_leaf || is_pure(lo, hi)) {
            return make_leaf(lo, hi, st);
        }

        // Visit features in random order; constant features do not count
        // towards max_features.
        const auto d = features_.size();
        for (std::size_t i = 0; i + 1 < d; ++i) {
            const auto j = i + static_cast<std::size_t>(uniform_index(rng_, d - i));
            std::swap(features_[i], features_[j]);
        }
        Candidate best;
        std::size_t visited = 0;
        for (std::size_t k = 0; k < d && visited < max_features_; ++k) {
            const auto f = features_[k];
            if (!(value(order_[f][hi - 1], f) > value(order_[f][lo], f))) continue;
            ++visited;
            if (opts_.strategy == SplitStrategy::best) {
                evaluate_best(f, lo, hi, st, best);
            } else {
                evaluate_random(f, lo, hi, st, best);
            }
        }
        if (!best.found) return make_leaf(lo, hi, st);

        for (std::size_t i = lo; i < hi; ++i) {
            const auto p = order_[0][i];
            goes_left_[p] = value(p, best.feature) <= best.threshold ? 1 : 0;
        }
        std::size_t mid = lo;
        for (auto& ord : order_) {
            std::size_t nl = 0, nr = 0;
            for (std::size_t i = lo; i < hi; ++i) {
                if (goes_left_[ord[i]]) ord[lo + nl++] = ord[i];
                else scratch_[nr++] = ord[i];
            }
            std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(nr),
                      ord.begin() + static_cast<std::ptrdiff_t>(lo + nl));
            mid = lo + nl;
        }

        const auto id = static_cast<int>(nodes_.size());
        TreeNode split;
        split.feature = static_cast<int>(best.feature);
        split.threshold = best.threshold;
        split.value = st.w > 0.0 ? st.s / st.w : 0.0;
        nodes_.push_back(split);
        const int left = build(lo, mid, depth + 1);
        const int right = build(mid, hi, depth + 1);
        nodes_[static_cast<std::size_t>(id)].left = left;
        nodes_[static_cast<std::size_t>(id)].right = right;
        return id;
    }

    const Matrix& X_;
    std::span<const double> target_;
    std::span<const std::size_t> samples_;
    std::span<const double> weights_;
    const TreeOptions& opts_;
    Rng& rng_;
    std::vector<std::vector<std::size_t>> order_;
    std::vector<std::uint8_t> goes_left_;
    std::vector<std::size_t> scratch_;
    std::vector<std::size_t> leaf_of_;
    std::vector<std::size_t> features_;
    std::size_t max_features_ = 0;
    std::vector<TreeNode> nodes_;
};

}  // namespace

TreeFit fit_tree(const Matrix& X, std::span<const double> target, std::span<const std::size_t> samples,
                 std::span<const double> weights, const TreeOptions& options, Rng& rng) {
    if (samples.empty()) throw ValidationError("cannot grow a tree on zero samples");
    if (weights.size() != samples.size()) throw ValidationError("weights must parallel samples");
    if (options.min_samples_leaf == 0 || options.min_samples_split < 2) {
        throw ValidationError("tree sample limits must be min_samples_leaf >= 1, min_samples_split >= 2");
    }
    Builder builder(X, target, samples, weights, options, rng);
    return builder.run();
}

}  // namespace ivbench::learn
