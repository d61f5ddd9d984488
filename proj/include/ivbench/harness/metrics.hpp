#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

namespace ivbench::harness {

enum class Metric { accuracy, auc, f1 };

inline constexpr std::array<Metric, 3> kAllMetrics = {Metric::accuracy, Metric::auc, Metric::f1};

std::string_view metric_name(Metric m);
Metric metric_from_name(std::string_view name);

struct Metrics {
    double accuracy = 0.0;
    double f1 = 0.0;
    std::optional<double> auc;  // undefined when y_true has a single class

    double get(Metric m) const;
};

// Probability that a random positive outscores a random negative; ties count
// one half. Empty when either class is absent.
std::optional<double> roc_auc(std::span<const int> y_true, std::span<const double> scores);

// F1 of class 1; zero when there are no true positives.
double f1_score(std::span<const int> y_true, std::span<const int> y_pred);

Metrics compute_metrics(std::span<const int> y_true, std::span<const int> y_pred, std::span<const double> scores);

}  // namespace ivbench::harness
