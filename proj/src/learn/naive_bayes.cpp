#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ivbench/core/error.hpp"
#include "ivbench/learn/classifiers.hpp"

namespace ivbench::learn {

std::shared_ptr<const GaussianNaiveBayes> GaussianNaiveBayes::train(const Matrix& X, std::span<const int> y,
                                                                    double var_smoothing) {
    check_training_data(X, y);
    if (var_smoothing < 0.0) throw ValidationError("var_smoothing must be >= 0");
    const auto d = X.cols();
    auto model = std::make_shared<GaussianNaiveBayes>();

    // Smoothing is relative to the largest per-feature variance of X.
    double max_var = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double m = 0.0, ss = 0.0;
        for (std::size_t i = 0; i < X.rows(); ++i) m += X(i, j);
        m /= static_cast<double>(X.rows());
        for (std::size_t i = 0; i < X.rows(); ++i) ss += (X(i, j) - m) * (X(i, j) - m);
        max_var = std::max(max_var, ss / static_cast<double>(X.rows()));
    }
    const double eps = var_smoothing * max_var;

    std::array<double, 2> count{};
    for (std::size_t c = 0; c < 2; ++c) {
        model->mean_[c].assign(d, 0.0);
        model->var_[c].assign(d, 0.0);
    }
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto c = static_cast<std::size_t>(y[i]);
        count[c] += 1.0;
        for (std::size_t j = 0; j < d; ++j) model->mean_[c][j] += X(i, j);
    }
    for (std::size_t c = 0; c < 2; ++c) {
        for (auto& m : model->mean_[c]) m /= count[c];
    }
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto c = static_cast<std::size_t>(y[i]);
        for (std::size_t j = 0; j < d; ++j) {
            const double dlt = X(i, j) - model->mean_[c][j];
            model->var_[c][j] += dlt * dlt;
        }
    }
    const double n = count[0] + count[1];
    for (std::size_t c = 0; c < 2; ++c) {
        for (auto& v : model->var_[c]) v = v / count[c] + eps;
        model->log_prior_[c] = std::log(count[c] / n);
    }
    // A feature constant within a class with var_smoothing = 0 would give a
    // degenerate density.
    for (std::size_t c = 0; c < 2; ++c) {
        for (auto& v : model->var_[c]) {
            if (!(v > 0.0)) v = std::numeric_limits<double>::min();
        }
    }
    return model;
}

std::array<double, 2> GaussianNaiveBayes::posterior(std::span<const double> x) const {
    std::array<double, 2> log_joint{};
    for (std::size_t c = 0; c < 2; ++c) {
        double lj = log_prior_[c];
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double dlt = x[j] - mean_[c][j];
            lj -= 0.5 * (std::log(2.0 * std::numbers::pi * var_[c][j]) + dlt * dlt / var_[c][j]);
        }
        log_joint[c] = lj;
    }
    const double mx = std::max(log_joint[0], log_joint[1]);
    const double e0 = std::exp(log_joint[0] - mx);
    const double e1 = std::exp(log_joint[1] - mx);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

double GaussianNaiveBayes::score_one(std::span<const double> x) const { return posterior(x)[1]; }

nlohmann::json GaussianNaiveBayes::parameters() const {
    return {{"mean", mean_}, {"var", var_}, {"log_prior", log_prior_}};
}

std::shared_ptr<const GaussianNaiveBayes> GaussianNaiveBayes::load(const nlohmann::json& params) {
    auto model = std::make_shared<GaussianNaiveBayes>();
    model->mean_ = params.at("mean").get<std::array<std::vector<double>, 2>>();
    model->var_ = params.at("var").get<std::array<std::vector<double>, 2>>();
    model->log_prior_ = params.at("log_prior").get<std::array<double, 2>>();
    return model;
}

}  // namespace ivbench::learn
