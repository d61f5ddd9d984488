#include "ivbench/learn/model.hpp"

#include <cmath>

#include "ivbench/core/error.hpp"
#include "ivbench/learn/classifiers.hpp"
#include "ivbench/learn/ensembles.hpp"

namespace ivbench::learn {

namespace {

constexpr int kModelSchemaVersion = 1;

struct KindInfo {
    ModelKind kind;
    std::string_view name;
    std::string_view display;
};

constexpr std::array<KindInfo, 7> kKinds = {{
    {ModelKind::svm_rbf, "svm_rbf", "SVM"},
    {ModelKind::logistic, "logistic", "LR"},
    {ModelKind::knn, "knn", "KNN"},
    {ModelKind::gaussian_nb, "gaussian_nb", "NB"},
    {ModelKind::random_forest, "random_forest", "RF"},
    {ModelKind::extra_trees, "extra_trees", "ET"},
    {ModelKind::gradient_boosting, "gradient_boosting", "GB"},
}};

const KindInfo& info(ModelKind kind) {
    for (const auto& k : kKinds) {
        if (k.kind == kind) return k;
    }
    throw ValidationError("unknown model kind");
}

std::size_t as_count(double v) { return static_cast<std::size_t>(std::llround(v)); }

}  // namespace

std::string_view kind_name(ModelKind kind) { return info(kind).name; }
std::string_view display_name(ModelKind kind) { return info(kind).display; }

ModelKind kind_from_name(std::string_view name) {
    for (const auto& k : kKinds) {
        if (k.name == name || k.display == name) return k.kind;
    }
    throw ValidationError("unknown model kind '" + std::string(name) + "'");
}

ModelSpec ModelSpec::defaults(ModelKind kind) {
    ModelSpec s;
    s.kind = kind;
    auto& h = s.hyperparameters;
    switch (kind) {
        case ModelKind::svm_rbf:
            h = {{"C", 1.0}, {"gamma", 0.0}, {"tol", 1e-3}, {"standardize", 1.0}};
            break;
        case ModelKind::logistic:
            h = {{"C", 1.0}, {"tol", 1e-8}, {"max_iter", 100.0}, {"standardize", 1.0}};
            break;
        case ModelKind::knn:
            h = {{"k", 5.0}, {"standardize", 1.0}};
            break;
        case ModelKind::gaussian_nb:
            h = {{"var_smoothing", 1e-9}};
            break;
        case ModelKind::random_forest:
            h = {{"n_estimators", 100.0}, {"max_depth", 10.0}, {"max_features", 0.0}, {"min_samples_leaf", 1.0}};
            break;
        case ModelKind::extra_trees:
            h = {{"n_estimators", 100.0}, {"max_depth", 0.0}, {"max_features", 0.0}, {"min_samples_leaf", 1.0}};
            break;
        case ModelKind::gradient_boosting:
            h = {{"n_estimators", 100.0}, {"max_depth", 10.0}, {"learning_rate", 0.1}, {"min_samples_leaf", 1.0}};
            break;
    }
    return s;
}

double ModelSpec::get(const std::string& name) const {
    if (auto it = hyperparameters.find(name); it != hyperparameters.end()) return it->second;
    const auto d = defaults(kind);
    if (auto it = d.hyperparameters.find(name); it != d.hyperparameters.end()) return it->second;
    throw ValidationError("model " + std::string(kind_name(kind)) + " has no hyperparameter '" + name + "'");
}

ModelSpec ModelSpec::with(const std::string& name, double value) const {
    ModelSpec out = *this;
    out.hyperparameters[name] = value;
    return out;
}

void ModelSpec::validate() const {
    const auto known = defaults(kind).hyperparameters;
    for (const auto& [name, value] : hyperparameters) {
        if (!known.contains(name)) {
            throw ValidationError("model " + std::string(kind_name(kind)) + " has no hyperparameter '" + name + "'");
        }
        if (!std::isfinite(value)) throw ValidationError("hyperparameter " + name + " must be finite");
    }
    auto require = [&](const char* name, bool ok, const char* rule) {
        if (!ok) throw ValidationError(std::string("hyperparameter ") + name + " must be " + rule);
    };
    switch (kind) {
        case ModelKind::svm_rbf:
            require("C", get("C") > 0, "> 0");
            require("gamma", get("gamma") >= 0, ">= 0 (0 selects 1/d)");
            require("tol", get("tol") > 0, "> 0");
            break;
        case ModelKind::logistic:
            require("C", get("C") > 0, "> 0");
            require("tol", get("tol") > 0, "> 0");
            require("max_iter", get("max_iter") >= 1, ">= 1");
            break;
        case ModelKind::knn:
            require("k", get("k") >= 1, ">= 1");
            break;
        case ModelKind::gaussian_nb:
            require("var_smoothing", get("var_smoothing") >= 0, ">= 0");
            break;
        case ModelKind::random_forest:
        case ModelKind::extra_trees:
        case ModelKind::gradient_boosting:
            require("n_estimators", get("n_estimators") >= 1, ">= 1");
            require("max_depth", get("max_depth") >= 0, ">= 1 (0 for unbounded where allowed)");
            require("min_samples_leaf", get("min_samples_leaf") >= 1, ">= 1");
            if (kind != ModelKind::extra_trees) require("max_depth", get("max_depth") >= 1, ">= 1");
            if (kind == ModelKind::gradient_boosting) {
                require("learning_rate", get("learning_rate") > 0, "> 0");
            } else {
                require("max_features", get("max_features") >= 0, ">= 0 (0 selects sqrt(d))");
            }
            break;
    }
}

nlohmann::json to_json(const ModelSpec& spec) {
    return {{"kind", kind_name(spec.kind)}, {"hyperparameters", spec.hyperparameters}};
}

ModelSpec model_spec_from_json(const nlohmann::json& doc) {
    ModelSpec s;
    s.kind = kind_from_name(doc.at("kind").get<std::string>());
    if (doc.contains("hyperparameters")) {
        s.hyperparameters = doc.at("hyperparameters").get<std::map<std::string, double>>();
    }
    s.validate();
    return s;
}

void check_training_data(const Matrix& X, std::span<const int> y) {
    if (X.empty() || X.cols() == 0) throw ValidationError("training matrix is empty");
    if (X.rows() != y.size()) throw ValidationError("training rows and labels differ in length");
    bool has[2] = {false, false};
    for (int v : y) {
        if (v != 0 && v != 1) throw ValidationError("labels must be 0 or 1");
        has[v] = true;
    }
    if (!has[0] || !has[1]) throw ValidationError("training labels contain a single class");
    for (double v : X.data()) {
        if (!std::isfinite(v)) throw ValidationError("training matrix contains a non-finite value");
    }
}

TrainedModel::TrainedModel(ModelSpec spec, std::shared_ptr<const Classifier> impl)
    : spec_(std::move(spec)), impl_(std::move(impl)) {
    if (!impl_) throw ValidationError("TrainedModel needs a classifier");
}

void TrainedModel::check_dimension(std::size_t d) const {
    if (d != impl_->dimension()) {
        throw ValidationError("input has " + std::to_string(d) + " features, model was trained on " +
                              std::to_string(impl_->dimension()));
    }
}

std::vector<double> TrainedModel::score(const Matrix& X) const {
    check_dimension(X.cols());
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) out[i] = impl_->score_one(X.row(i));
    return out;
}

std::vector<int> TrainedModel::predict(const Matrix& X) const {
    const auto s = score(X);
    std::vector<int> out(s.size());
    const auto kind = impl_->score_kind();
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = decide(kind, s[i]);
    return out;
}

int TrainedModel::predict_one(std::span<const double> x) const {
    check_dimension(x.size());
    return decide(impl_->score_kind(), impl_->score_one(x));
}

nlohmann::json TrainedModel::to_json() const {
    return {{"schema", "ivbench.model"},
            {"version", kModelSchemaVersion},
            {"spec", learn::to_json(spec_)},
            {"parameters", impl_->parameters()}};
}

TrainedModel TrainedModel::from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("version").get<int>() != kModelSchemaVersion) {
            throw ValidationError("unsupported model schema version");
        }
        auto spec = model_spec_from_json(doc.at("spec"));
        const auto& p = doc.at("parameters");
        std::shared_ptr<const Classifier> impl;
        switch (spec.kind) {
            case ModelKind::svm_rbf: impl = SvmRbf::load(p); break;
            case ModelKind::logistic: impl = LogisticRegression::load(p); break;
            case ModelKind::knn: impl = KNearestNeighbors::load(p); break;
            case ModelKind::gaussian_nb: impl = GaussianNaiveBayes::load(p); break;
            case ModelKind::random_forest:
            case ModelKind::extra_trees: impl = VotingForest::load(p); break;
            case ModelKind::gradient_boosting: impl = GradientBoosting::load(p); break;
        }
        return TrainedModel(std::move(spec), std::move(impl));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed model document: ") + e.what());
    }
}

TrainedModel fit(const ModelSpec& spec, const Matrix& X, std::span<const int> y, std::uint64_t seed) {
    spec.validate();
    check_training_data(X, y);
    const auto d = X.cols();
    std::shared_ptr<const Classifier> impl;
    switch (spec.kind) {
        case ModelKind::svm_rbf:
            impl = SvmRbf::train(X, y, {spec.get("C"), spec.get("gamma"), spec.get("tol"), spec.get("standardize") != 0});
            break;
        case ModelKind::logistic:
            impl = LogisticRegression::train(
                X, y, {spec.get("C"), spec.get("tol"), as_count(spec.get("max_iter")), spec.get("standardize") != 0});
            break;
        case ModelKind::knn:
            impl = KNearestNeighbors::train(X, y, as_count(spec.get("k")), spec.get("standardize") != 0);
            break;
        case ModelKind::gaussian_nb:
            impl = GaussianNaiveBayes::train(X, y, spec.get("var_smoothing"));
            break;
        case ModelKind::random_forest:
        case ModelKind::extra_trees: {
            VotingForest::Options o;
            o.n_estimators = as_count(spec.get("n_estimators"));
            o.bootstrap = spec.kind == ModelKind::random_forest;
            o.tree.max_depth = static_cast<int>(as_count(spec.get("max_depth")));
            o.tree.min_samples_leaf = as_count(spec.get("min_samples_leaf"));
            const auto mf = as_count(spec.get("max_features"));
            o.tree.max_features = mf == 0 ? sqrt_features(d) : mf;
            o.tree.strategy = spec.kind == ModelKind::random_forest ? SplitStrategy::best : SplitStrategy::random;
            impl = VotingForest::train(X, y, o, seed);
            break;
        }
        case ModelKind::gradient_boosting: {
            GradientBoosting::Options o;
            o.n_estimators = as_count(spec.get("n_estimators"));
            o.learning_rate = spec.get("learning_rate");
            o.tree.max_depth = static_cast<int>(as_count(spec.get("max_depth")));
            o.tree.min_samples_leaf = as_count(spec.get("min_samples_leaf"));
            o.tree.max_features = 0;
            o.tree.strategy = SplitStrategy::best;
            impl = GradientBoosting::train(X, y, o, seed);
            break;
        }
    }
    return TrainedModel(spec, std::move(impl));
}

}  // namespace ivbench::learn
