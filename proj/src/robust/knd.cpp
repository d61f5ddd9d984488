#include "ivbench/robust/knd.hpp"

#include <algorithm>
#include <numeric>

#include "ivbench/core/error.hpp"

namespace ivbench::robust {

namespace {

double inverse_variance(double scale, bool& regularized) {
    const double var = scale * scale;
    if (var > 0.0) return 1.0 / var;
    regularized = true;
    return 1.0 / kKndVarianceFloor;
}

}  // namespace

KndDistance knd_distance(const ImpreciseInstance& a, const ImpreciseInstance& b) {
    if (a.dimension() != b.dimension()) throw ValidationError("KND distance needs equal dimensions");
    KndDistance out;
    for (std::size_t j = 0; j < a.dimension(); ++j) {
        const double d = a.center[j] - b.center[j];
        const double m = 0.5 * (inverse_variance(a.scale[j], out.regularized) +
                                inverse_variance(b.scale[j], out.regularized));
        out.value += d * d * m;
    }
    return out;
}

KndClassifier KndClassifier::fit(std::vector<ImpreciseInstance> train, std::size_t k) {
    if (train.empty()) throw ValidationError("KND needs a non-empty training set");
    if (k == 0 || k > train.size()) throw ValidationError("KND requires 1 <= k <= training size");
    const auto d = train.front().dimension();
    KndClassifier model;
    model.k_ = k;
    model.inv_var_.reserve(train.size());
    for (const auto& inst : train) {
        if (inst.dimension() != d) throw ValidationError("KND training instances differ in dimension");
        std::vector<double> iv(d);
        bool unused = false;
        for (std::size_t j = 0; j < d; ++j) iv[j] = inverse_variance(inst.scale[j], unused);
        model.inv_var_.push_back(std::move(iv));
    }
    model.train_ = std::move(train);
    return model;
}

std::vector<std::size_t> KndClassifier::neighbors(const ImpreciseInstance& query) const {
    const auto d = train_.front().dimension();
    if (query.dimension() != d) throw ValidationError("query dimension does not match KND training data");
    std::vector<double> q_inv(d);
    bool unused = false;
    for (std::size_t j = 0; j < d; ++j) q_inv[j] = inverse_variance(query.scale[j], unused);

    const auto n = train_.size();
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        const auto& c = train_[i].center;
        const auto& iv = inv_var_[i];
        for (std::size_t j = 0; j < d; ++j) {
            const double delta = c[j] - query.center[j];
            s += delta * delta * 0.5 * (iv[j] + q_inv[j]);
        }
        dist[i] = s;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k_), order.end(),
                      [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });
    order.resize(k_);
    return order;
}

double KndClassifier::score(const ImpreciseInstance& query) const {
    std::size_t ones = 0;
    for (auto i : neighbors(query)) ones += train_[i].label == 1 ? 1 : 0;
    return static_cast<double>(ones) / static_cast<double>(k_);
}

std::vector<double> KndClassifier::score(std::span<const ImpreciseInstance> queries) const {
    std::vector<double> out;
    out.reserve(queries.size());
    for (const auto& q : queries) out.push_back(score(q));
    return out;
}

std::vector<int> KndClassifier::predict(std::span<const ImpreciseInstance> queries) const {
    std::vector<int> out;
    out.reserve(queries.size());
    for (const auto& q : queries) out.push_back(predict(q));
    return out;
}

}  // namespace ivbench::robust
