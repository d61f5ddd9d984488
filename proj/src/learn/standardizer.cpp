#include "ivbench/learn/standardizer.hpp"

#include <cmath>

namespace ivbench::learn {

Standardizer Standardizer::fit(const Matrix& X) {
    Standardizer s;
    const auto n = static_cast<double>(X.rows());
    s.mean_.assign(X.cols(), 0.0);
    s.scale_.assign(X.cols(), 1.0);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t j = 0; j < X.cols(); ++j) s.mean_[j] += X(i, j);
    }
    for (auto& m : s.mean_) m /= n;
    std::vector<double> var(X.cols(), 0.0);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t j = 0; j < X.cols(); ++j) {
            const double dlt = X(i, j) - s.mean_[j];
            var[j] += dlt * dlt;
        }
    }
    for (std::size_t j = 0; j < X.cols(); ++j) {
        const double sd = std::sqrt(var[j] / n);
        s.scale_[j] = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

Standardizer Standardizer::identity(std::size_t) { return {}; }

std::vector<double> Standardizer::apply(std::span<const double> x) const {
    std::vector<double> out(x.begin(), x.end());
    if (!enabled()) return out;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = (out[j] - mean_[j]) / scale_[j];
    return out;
}

Matrix Standardizer::apply(const Matrix& X) const {
    if (!enabled()) return X;
    Matrix out(X.rows(), X.cols());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t j = 0; j < X.cols(); ++j) out(i, j) = (X(i, j) - mean_[j]) / scale_[j];
    }
    return out;
}

nlohmann::json Standardizer::to_json() const {
    if (!enabled()) return nullptr;
    return {{"mean", mean_}, {"scale", scale_}};
}

Standardizer Standardizer::from_json(const nlohmann::json& doc) {
    Standardizer s;
    if (doc.is_null()) return s;
    s.mean_ = doc.at("mean").get<std::vector<double>>();
    s.scale_ = doc.at("scale").get<std::vector<double>>();
    return s;
}

}  // namespace ivbench::learn
