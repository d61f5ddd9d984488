#include <algorithm>
#include <numeric>

#include "ivbench/core/error.hpp"
#include "ivbench/learn/classifiers.hpp"

namespace ivbench::learn {

std::shared_ptr<const KNearestNeighbors> KNearestNeighbors::train(const Matrix& X, std::span<const int> y,
                                                                  std::size_t k, bool standardize) {
    check_training_data(X, y);
    if (k == 0) throw ValidationError("k must be >= 1");
    if (k > X.rows()) throw ValidationError("k exceeds the training set size");
    auto model = std::make_shared<KNearestNeighbors>();
    model->standardizer_ = standardize ? Standardizer::fit(X) : Standardizer{};
    model->train_ = model->standardizer_.apply(X);
    model->labels_.assign(y.begin(), y.end());
    model->k_ = k;
    return model;
}

double KNearestNeighbors::score_one(std::span<const double> x) const {
    const auto z = standardizer_.apply(x);
    const auto n = train_.rows();
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sq = 0.0;
        const auto r = train_.row(i);
        for (std::size_t j = 0; j < z.size(); ++j) sq += (r[j] - z[j]) * (r[j] - z[j]);
        dist[i] = sq;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k_), order.end(),
                      [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });
    std::size_t ones = 0;
    for (std::size_t i = 0; i < k_; ++i) ones += labels_[order[i]] == 1 ? 1 : 0;
    return static_cast<double>(ones) / static_cast<double>(k_);
}

nlohmann::json KNearestNeighbors::parameters() const {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < train_.rows(); ++i) rows.emplace_back(train_.row(i).begin(), train_.row(i).end());
    return {{"k", k_}, {"instances", rows}, {"labels", labels_}, {"standardizer", standardizer_.to_json()}};
}

std::shared_ptr<const KNearestNeighbors> KNearestNeighbors::load(const nlohmann::json& params) {
    auto model = std::make_shared<KNearestNeighbors>();
    model->k_ = params.at("k").get<std::size_t>();
    model->train_ = Matrix::from_rows(params.at("instances").get<std::vector<std::vector<double>>>());
    model->labels_ = params.at("labels").get<std::vector<int>>();
    model->standardizer_ = Standardizer::from_json(params.at("standardizer"));
    return model;
}

}  // namespace ivbench::learn
