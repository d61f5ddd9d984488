#include "ivbench/harness/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "ivbench/core/error.hpp"

namespace ivbench::harness {

std::string_view metric_name(Metric m) {
    switch (m) {
        case Metric::accuracy: return "accuracy";
        case Metric::auc: return "auc";
        case Metric::f1: return "f1";
    }
    return "?";
}

Metric metric_from_name(std::string_view name) {
    for (auto m : kAllMetrics) {
        if (metric_name(m) == name) return m;
    }
    throw ValidationError("unknown metric '" + std::string(name) + "'");
}

double Metrics::get(Metric m) const {
    switch (m) {
        case Metric::accuracy: return accuracy;
        case Metric::f1: return f1;
        case Metric::auc:
            if (!auc) throw ValidationError("AUC is undefined for a single-class sample");
            return *auc;
    }
    return 0.0;
}

std::optional<double> roc_auc(std::span<const int> y_true, std::span<const double> scores) {
    if (y_true.size() != scores.size()) throw ValidationError("labels and scores differ in length");
    const auto n = y_true.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    // Mann-Whitney U with mid-ranks for tied scores.
    double rank_sum_pos = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (y_true[order[k]] == 1) {
                rank_sum_pos += mid_rank;
                ++n_pos;
            }
        }
        i = j;
    }
    const auto n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) return std::nullopt;
    const double p = static_cast<double>(n_pos);
    const double u = rank_sum_pos - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(n_neg));
}

double f1_score(std::span<const int> y_true, std::span<const int> y_pred) {
    if (y_true.size() != y_pred.size()) throw ValidationError("labels and predictions differ in length");
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_pred[i] == 1 && y_true[i] == 1) ++tp;
        else if (y_pred[i] == 1) ++fp;
        else if (y_true[i] == 1) ++fn;
    }
    if (tp == 0) return 0.0;
    return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

Metrics compute_metrics(std::span<const int> y_true, std::span<const int> y_pred, std::span<const double> scores) {
    if (y_true.empty()) throw ValidationError("cannot score an empty sample");
    if (y_true.size() != y_pred.size() || y_true.size() != scores.size()) {
        throw ValidationError("labels, predictions and scores must have equal lengths");
    }
    Metrics m;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) correct += y_true[i] == y_pred[i] ? 1 : 0;
    m.accuracy = static_cast<double>(correct) / static_cast<double>(y_true.size());
    m.f1 = f1_score(y_true, y_pred);
    m.auc = roc_auc(y_true, scores);
    return m;
}

}  // namespace ivbench::harness
