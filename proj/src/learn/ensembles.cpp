#include "ivbench/learn/ensembles.hpp"

#include <cmath>

#include "ivbench/core/error.hpp"
#include "ivbench/core/random.hpp"

namespace ivbench::learn {

namespace {

double sigmoid(double t) {
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double log_loss(std::span<const int> y, std::span<const double> raw) {
    double loss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double m = y[i] == 1 ? raw[i] : -raw[i];
        loss += m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
    }
    return loss / static_cast<double>(y.size());
}

}  // namespace

std::vector<std::size_t> VotingForest::bootstrap_counts(std::uint64_t seed, std::size_t t, std::size_t n) {
    Rng rng = make_rng(seed, {t, 0});
    std::vector<std::size_t> counts(n, 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[uniform_index(rng, n)];
    return counts;
}

std::uint64_t VotingForest::tree_seed(std::uint64_t seed, std::size_t t) { return derive_seed(seed, {t, 1}); }

std::shared_ptr<const VotingForest> VotingForest::train(const Matrix& X, std::span<const int> y, const Options& opts,
                                                        std::uint64_t seed) {
    check_training_data(X, y);
    if (opts.n_estimators == 0) throw ValidationError("n_estimators must be >= 1");
    const auto n = X.rows();
    std::vector<double> target(y.begin(), y.end());
    auto model = std::make_shared<VotingForest>();
    model->dim_ = X.cols();
    model->trees_.reserve(opts.n_estimators);
    for (std::size_t t = 0; t < opts.n_estimators; ++t) {
        std::vector<std::size_t> samples;
        std::vector<double> weights;
        if (opts.bootstrap) {
            const auto counts = bootstrap_counts(seed, t, n);
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[i] == 0) continue;
                samples.push_back(i);
                weights.push_back(static_cast<double>(counts[i]));
            }
        } else {
            samples.resize(n);
            for (std::size_t i = 0; i < n; ++i) samples[i] = i;
            weights.assign(n, 1.0);
        }
        Rng rng(tree_seed(seed, t));
        model->trees_.push_back(fit_tree(X, target, samples, weights, opts.tree, rng).tree);
    }
    return model;
}

std::shared_ptr<const VotingForest> VotingForest::from_trees(std::vector<DecisionTree> trees, std::size_t dimension) {
    if (trees.empty()) throw ValidationError("a forest needs at least one tree");
    auto model = std::make_shared<VotingForest>();
    model->dim_ = dimension;
    model->trees_ = std::move(trees);
    return model;
}

double VotingForest::score_one(std::span<const double> x) const {
    std::size_t ones = 0;
    for (const auto& t : trees_) ones += static_cast<std::size_t>(t.vote(x));
    return static_cast<double>(ones) / static_cast<double>(trees_.size());
}

nlohmann::json VotingForest::parameters() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : trees_) trees.push_back(t.to_json());
    return {{"dimension", dim_}, {"trees", trees}};
}

std::shared_ptr<const VotingForest> VotingForest::load(const nlohmann::json& params) {
    std::vector<DecisionTree> trees;
    for (const auto& t : params.at("trees")) trees.push_back(DecisionTree::from_json(t));
    return from_trees(std::move(trees), params.at("dimension").get<std::size_t>());
}

std::shared_ptr<const GradientBoosting> GradientBoosting::train(const Matrix& X, std::span<const int> y,
                                                                const Options& opts, std::uint64_t seed) {
    check_training_data(X, y);
    if (opts.n_estimators == 0) throw ValidationError("n_estimators must be >= 1");
    if (!(opts.learning_rate > 0.0)) throw ValidationError("learning_rate must be positive");
    const auto n = X.rows();
    auto model = std::make_shared<GradientBoosting>();
    model->dim_ = X.cols();
    model->learning_rate_ = opts.learning_rate;

    double pos = 0.0;
    for (int v : y) pos += v;
    const double prior = pos / static_cast<double>(n);
    model->init_ = std::log(prior / (1.0 - prior));

    std::vector<double> raw(n, model->init_);
    std::vector<std::size_t> samples(n);
    for (std::size_t i = 0; i < n; ++i) samples[i] = i;
    const std::vector<double> weights(n, 1.0);
    std::vector<double> residual(n);
    std::vector<double> prob(n);
    model->train_loss_.push_back(log_loss(y, raw));

    for (std::size_t m = 0; m < opts.n_estimators; ++m) {
        for (std::size_t i = 0; i < n; ++i) {
            prob[i] = sigmoid(raw[i]);
            residual[i] = static_cast<double>(y[i]) - prob[i];
        }
        Rng rng = make_rng(seed, {m});
        auto fitted = fit_tree(X, residual, samples, weights, opts.tree, rng);

        // One Newton step per leaf: sum(residual) / sum(p (1 - p)).
        const auto& nodes = fitted.tree.nodes();
        std::vector<double> num(nodes.size(), 0.0), den(nodes.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto leaf = fitted.leaf_of_sample[i];
            num[leaf] += residual[i];
            den[leaf] += prob[i] * (1.0 - prob[i]);
        }
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            if (nodes[k].feature >= 0) continue;
            fitted.tree.set_leaf_value(k, den[k] < 1e-150 ? 0.0 : num[k] / den[k]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            raw[i] += opts.learning_rate * fitted.tree.nodes()[fitted.leaf_of_sample[i]].value;
        }
        model->train_loss_.push_back(log_loss(y, raw));
        model->trees_.push_back(std::move(fitted.tree));
    }
    return model;
}

double GradientBoosting::raw_score(std::span<const double> x) const {
    double raw = init_;
    for (const auto& t : trees_) raw += learning_rate_ * t.predict_value(x);
    return raw;
}

double GradientBoosting::score_one(std::span<const double> x) const { return sigmoid(raw_score(x)); }

nlohmann::json GradientBoosting::parameters() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : trees_) trees.push_back(t.to_json());
    return {{"dimension", dim_}, {"init", init_}, {"learning_rate", learning_rate_}, {"trees", trees}};
}

std::shared_ptr<const GradientBoosting> GradientBoosting::load(const nlohmann::json& params) {
    auto model = std::make_shared<GradientBoosting>();
    model->dim_ = params.at("dimension").get<std::size_t>();
    model->init_ = params.at("init").get<double>();
    model->learning_rate_ = params.at("learning_rate").get<double>();
    for (const auto& t : params.at("trees")) model->trees_.push_back(DecisionTree::from_json(t));
    return model;
}

}  // namespace ivbench::learn
