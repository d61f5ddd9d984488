#include <Eigen/Dense>
#include <cmath>

#include "ivbench/core/error.hpp"
#include "ivbench/learn/classifiers.hpp"

namespace ivbench::learn {

namespace {

// log(1 + e^t) without overflow.
double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

// C * sum_i log(1 + exp(-s_i z_i)) + |w|^2 / 2, intercept unpenalized.
double objective(const Eigen::MatrixXd& A, const Eigen::VectorXd& s, const Eigen::VectorXd& theta, double C) {
    const Eigen::VectorXd z = A * theta;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) loss += softplus(-s[i] * z[i]);
    const auto d = theta.size() - 1;
    return C * loss + 0.5 * theta.head(d).squaredNorm();
}

}  // namespace

std::shared_ptr<const LogisticRegression> LogisticRegression::train(const Matrix& X, std::span<const int> y,
                                                                    const Options& opts) {
    check_training_data(X, y);
    if (!(opts.C > 0.0)) throw ValidationError("logistic C must be positive");
    auto model = std::make_shared<LogisticRegression>();
    model->standardizer_ = opts.standardize ? Standardizer::fit(X) : Standardizer{};
    const Matrix Z = model->standardizer_.apply(X);
    const auto n = static_cast<Eigen::Index>(Z.rows());
    const auto d = static_cast<Eigen::Index>(Z.cols());

    // Design matrix with a trailing intercept column.
    Eigen::MatrixXd A(n, d + 1);
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) A(i, j) = Z(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        A(i, d) = 1.0;
        s[i] = y[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
    }
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
    double f = objective(A, s, theta, opts.C);
    model->loss_history_.push_back(f);
    double g0 = -1.0;

    for (std::size_t it = 0; it < opts.max_iterations; ++it) {
        const Eigen::VectorXd z = A * theta;
        Eigen::VectorXd resid(n), curv(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double p = sigmoid(z[i]);
            resid[i] = p - (s[i] > 0 ? 1.0 : 0.0);
            curv[i] = std::max(p * (1.0 - p), 1e-12);
        }
        Eigen::VectorXd grad = opts.C * (A.transpose() * resid);
        grad.head(d) += theta.head(d);
        const double gnorm = grad.norm();
        if (g0 < 0) g0 = std::max(gnorm, 1.0);
        if (gnorm <= opts.tolerance * g0) break;

        Eigen::MatrixXd H = opts.C * (A.transpose() * curv.asDiagonal() * A);
        H.diagonal().head(d).array() += 1.0;
        const Eigen::VectorXd step = H.ldlt().solve(-grad);

        // Backtracking (Armijo); only accepted steps enter the history.
        double t = 1.0;
        const double slope = grad.dot(step);
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            const Eigen::VectorXd cand = theta + t * step;
            const double fc = objective(A, s, cand, opts.C);
            if (fc <= f + 1e-4 * t * slope) {
                theta = cand;
                f = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
        model->loss_history_.push_back(f);
    }
    model->weights_.assign(theta.data(), theta.data() + d);
    model->bias_ = theta[d];
    return model;
}

std::shared_ptr<const LogisticRegression> LogisticRegression::from_weights(std::vector<double> weights, double bias) {
    auto model = std::make_shared<LogisticRegression>();
    model->weights_ = std::move(weights);
    model->bias_ = bias;
    return model;
}

double LogisticRegression::score_one(std::span<const double> x) const {
    const auto z = standardizer_.apply(x);
    double m = bias_;
    for (std::size_t j = 0; j < weights_.size(); ++j) m += weights_[j] * z[j];
    return sigmoid(m);
}

nlohmann::json LogisticRegression::parameters() const {
    return {{"weights", weights_}, {"bias", bias_}, {"standardizer", standardizer_.to_json()}};
}

std::shared_ptr<const LogisticRegression> LogisticRegression::load(const nlohmann::json& params) {
    auto model = std::make_shared<LogisticRegression>();
    model->weights_ = params.at("weights").get<std::vector<double>>();
    model->bias_ = params.at("bias").get<double>();
    model->standardizer_ = Standardizer::from_json(params.at("standardizer"));
    return model;
}

}  // namespace ivbench::learn
