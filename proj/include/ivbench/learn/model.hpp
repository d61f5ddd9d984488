#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ivbench/core/matrix.hpp"

namespace ivbench::learn {

enum class ModelKind { svm_rbf, logistic, knn, gaussian_nb, random_forest, extra_trees, gradient_boosting };

inline constexpr std::array<ModelKind, 7> kStandardKinds = {
    ModelKind::svm_rbf,       ModelKind::logistic,    ModelKind::knn,
    ModelKind::gaussian_nb,   ModelKind::random_forest, ModelKind::gradient_boosting,
    ModelKind::extra_trees,
};

std::string_view kind_name(ModelKind kind);     // "svm_rbf", ...
std::string_view display_name(ModelKind kind);  // "SVM", "LR", ...
ModelKind kind_from_name(std::string_view name);

// What a classifier's score means, which fixes its decision rule.
enum class ScoreKind {
    margin,       // predict 1 iff score >= 0
    probability,  // predict 1 iff score >= 0.5
    vote_share,   // predict 1 iff score > 0.5 (ties go to class 0)
};

inline int decide(ScoreKind kind, double score) {
    switch (kind) {
        case ScoreKind::margin: return score >= 0.0 ? 1 : 0;
        case ScoreKind::probability: return score >= 0.5 ? 1 : 0;
        case ScoreKind::vote_share: return score > 0.5 ? 1 : 0;
    }
    return 0;
}

// Model kind plus named hyperparameters. Unset names fall back to defaults()
// of the kind. Defaults:
//   svm_rbf:           C=1, gamma=1/d (0 means 1/d), tol=1e-3, standardize=1
//   logistic:          C=1, tol=1e-8, max_iter=100, standardize=1
//   knn:               k=5, standardize=1
//   gaussian_nb:       var_smoothing=1e-9
//   random_forest:     n_estimators=100, max_depth=10, max_features=0 (sqrt d)
//   extra_trees:       n_estimators=100, max_depth=0 (unbounded), max_features=0
//   gradient_boosting: n_estimators=100, max_depth=10, learning_rate=0.1
struct ModelSpec {
    ModelKind kind = ModelKind::svm_rbf;
    std::map<std::string, double> hyperparameters;

    static ModelSpec defaults(ModelKind kind);
    double get(const std::string& name) const;
    ModelSpec with(const std::string& name, double value) const;
    // Throws ValidationError naming the offending hyperparameter.
    void validate() const;
};

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& doc);

// Fitted parameters of one model. Implementations are immutable after fit.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual std::size_t dimension() const = 0;
    virtual ScoreKind score_kind() const = 0;
    virtual double score_one(std::span<const double> x) const = 0;
    virtual nlohmann::json parameters() const = 0;
};

// Shareable handle over a fitted Classifier. Copies share the parameters.
class TrainedModel {
public:
    TrainedModel(ModelSpec spec, std::shared_ptr<const Classifier> impl);

    const ModelSpec& spec() const noexcept { return spec_; }
    ModelKind kind() const noexcept { return spec_.kind; }
    std::size_t dimension() const { return impl_->dimension(); }
    ScoreKind score_kind() const { return impl_->score_kind(); }
    const Classifier& classifier() const noexcept { return *impl_; }

    std::vector<double> score(const Matrix& X) const;
    std::vector<int> predict(const Matrix& X) const;
    int predict_one(std::span<const double> x) const;

    nlohmann::json to_json() const;
    static TrainedModel from_json(const nlohmann::json& doc);

private:
    void check_dimension(std::size_t d) const;

    ModelSpec spec_;
    std::shared_ptr<const Classifier> impl_;
};

// Deterministic in (spec, X, y, seed). Requires both classes in y and finite X.
TrainedModel fit(const ModelSpec& spec, const Matrix& X, std::span<const int> y, std::uint64_t seed);

// Shared precondition check used by every learner.
void check_training_data(const Matrix& X, std::span<const int> y);

}  // namespace ivbench::learn
