#include <cmath>

#include "ivbench/core/error.hpp"
#include "ivbench/learn/classifiers.hpp"

namespace ivbench::learn {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
    double sq = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        sq += d * d;
    }
    return std::exp(-gamma * sq);
}

std::shared_ptr<const SvmRbf> SvmRbf::train(const Matrix& X, std::span<const int> y, const Options& opts) {
    check_training_data(X, y);
    auto model = std::make_shared<SvmRbf>();
    model->dim_ = X.cols();
    model->gamma_ = opts.gamma > 0.0 ? opts.gamma : 1.0 / static_cast<double>(X.cols());
    model->standardizer_ = opts.standardize ? Standardizer::fit(X) : Standardizer{};
    const Matrix Z = model->standardizer_.apply(X);

    const double gamma = model->gamma_;
    CachedKernel kernel(Z.rows(), [&Z, gamma](std::size_t i, std::size_t j) {
        return rbf_kernel(Z.row(i), Z.row(j), gamma);
    });
    model->solution_ = solve_svm_dual(kernel, y, {opts.C, opts.tolerance, 0});

    const auto& alpha = model->solution_.alpha;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] <= 0.0) continue;
        model->support_.append_row(Z.row(i));
        model->coef_.push_back(alpha[i] * (y[i] == 1 ? 1.0 : -1.0));
    }
    if (model->support_.empty()) model->support_ = Matrix(0, X.cols());
    model->bias_ = model->solution_.bias;
    return model;
}

double SvmRbf::score_one(std::span<const double> x) const {
    const auto z = standardizer_.apply(x);
    double s = bias_;
    for (std::size_t i = 0; i < support_.rows(); ++i) s += coef_[i] * rbf_kernel(support_.row(i), z, gamma_);
    return s;
}

nlohmann::json SvmRbf::parameters() const {
    std::vector<std::vector<double>> sv;
    for (std::size_t i = 0; i < support_.rows(); ++i) sv.emplace_back(support_.row(i).begin(), support_.row(i).end());
    return {{"dimension", dim_},       {"gamma", gamma_}, {"bias", bias_},
            {"coefficients", coef_},  {"support_vectors", sv},
            {"standardizer", standardizer_.to_json()}};
}

std::shared_ptr<const SvmRbf> SvmRbf::load(const nlohmann::json& params) {
    auto model = std::make_shared<SvmRbf>();
    model->dim_ = params.at("dimension").get<std::size_t>();
    model->gamma_ = params.at("gamma").get<double>();
    model->bias_ = params.at("bias").get<double>();
    model->coef_ = params.at("coefficients").get<std::vector<double>>();
    model->support_ = Matrix::from_rows(params.at("support_vectors").get<std::vector<std::vector<double>>>());
    if (model->support_.empty()) model->support_ = Matrix(0, model->dim_);
    model->standardizer_ = Standardizer::from_json(params.at("standardizer"));
    return model;
}

}  // namespace ivbench::learn
