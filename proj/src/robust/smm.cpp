#include "ivbench/robust/smm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>

#include "ivbench/core/error.hpp"

namespace ivbench::robust {

double smm_log_kernel(const ImpreciseInstance& a, const ImpreciseInstance& b, double gamma) {
    if (a.dimension() != b.dimension()) throw ValidationError("SMM kernel needs equal dimensions");
    if (!(gamma > 0.0)) throw ValidationError("SMM kernel gamma must be positive");
    double quad = 0.0;
    double log_det = 0.0;
    for (std::size_t j = 0; j < a.dimension(); ++j) {
        const double var = a.scale[j] * a.scale[j] + b.scale[j] * b.scale[j];
        const double d = a.center[j] - b.center[j];
        quad += d * d / (var + 1.0 / gamma);
        log_det += std::log1p(gamma * var);
    }
    return -0.5 * quad - 0.5 * log_det;
}

double smm_kernel(const ImpreciseInstance& a, const ImpreciseInstance& b, double gamma) {
    return std::exp(smm_log_kernel(a, b, gamma));
}

ImpreciseInstance SmmClassifier::transform(const ImpreciseInstance& inst) const {
    if (mean_.empty()) return inst;
    ImpreciseInstance out = inst;
    for (std::size_t j = 0; j < out.dimension(); ++j) {
        out.center[j] = (inst.center[j] - mean_[j]) / sd_[j];
        out.scale[j] = inst.scale[j] / sd_[j];
    }
    return out;
}

SmmClassifier SmmClassifier::fit(std::span<const ImpreciseInstance> train, const Options& opts) {
    if (train.empty()) throw ValidationError("SMM needs a non-empty training set");
    if (!(opts.C > 0.0)) throw ValidationError("SMM C must be positive");
    const auto n = train.size();
    const auto d = train.front().dimension();
    bool has[2] = {false, false};
    for (const auto& inst : train) {
        if (inst.dimension() != d) throw ValidationError("SMM training instances differ in dimension");
        if (inst.label != 0 && inst.label != 1) throw ValidationError("labels must be 0 or 1");
        has[inst.label] = true;
    }
    if (!has[0] || !has[1]) throw ValidationError("SMM training labels contain a single class");

    SmmClassifier model;
    model.gamma_ = opts.gamma > 0.0 ? opts.gamma : 1.0 / static_cast<double>(d);
    if (opts.standardize) {
        model.mean_.assign(d, 0.0);
        model.sd_.assign(d, 0.0);
        for (const auto& inst : train) {
            for (std::size_t j = 0; j < d; ++j) model.mean_[j] += inst.center[j];
        }
        for (auto& m : model.mean_) m /= static_cast<double>(n);
        for (const auto& inst : train) {
            for (std::size_t j = 0; j < d; ++j) {
                const double dl = inst.center[j] - model.mean_[j];
                model.sd_[j] += dl * dl;
            }
        }
        for (auto& s : model.sd_) {
            s = std::sqrt(s / static_cast<double>(n));
            if (!(s > 0.0)) s = 1.0;
        }
    }
    std::vector<ImpreciseInstance> z;
    z.reserve(n);
    for (const auto& inst : train) z.push_back(model.transform(inst));

    Matrix gram(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double k = smm_kernel(z[i], z[j], model.gamma_);
            if (!std::isfinite(k)) throw NumericError("SMM Gram matrix has a non-finite entry");
            gram(i, j) = k;
            gram(j, i) = k;
        }
    }
    {
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> G(
            gram.data().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        Eigen::LLT<Eigen::MatrixXd> llt(G);
        if (llt.info() != Eigen::Success) {
            model.jittered_ = true;
            for (std::size_t i = 0; i < n; ++i) gram(i, i) += kJitter;
        }
    }

    std::vector<int> labels = labels_of(train);
    learn::PrecomputedKernel kernel(gram);
    model.solution_ = learn::solve_svm_dual(kernel, labels, {opts.C, opts.tolerance, 0});
    for (std::size_t i = 0; i < n; ++i) {
        const double a = model.solution_.alpha[i];
        if (a <= 0.0) continue;
        model.support_.push_back(z[i]);
        model.coef_.push_back(a * (labels[i] == 1 ? 1.0 : -1.0));
    }
    model.bias_ = model.solution_.bias;
    model.gram_ = std::move(gram);
    return model;
}

double SmmClassifier::decision(const ImpreciseInstance& query) const {
    const auto q = transform(query);
    double s = bias_;
    for (std::size_t i = 0; i < support_.size(); ++i) s += coef_[i] * smm_kernel(support_[i], q, gamma_);
    return s;
}

std::vector<double> SmmClassifier::decision(std::span<const ImpreciseInstance> queries) const {
    std::vector<double> out;
    out.reserve(queries.size());
    for (const auto& q : queries) out.push_back(decision(q));
    return out;
}

std::vector<int> SmmClassifier::predict(std::span<const ImpreciseInstance> queries) const {
    std::vector<int> out;
    out.reserve(queries.size());
    for (const auto& q : queries) out.push_back(predict(q));
    return out;
}

}  // namespace ivbench::robust
