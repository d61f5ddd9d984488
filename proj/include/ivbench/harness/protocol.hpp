#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ivbench/core/matrix.hpp"
#include "ivbench/iv/dataset.hpp"
#include "ivbench/iv/perturbation.hpp"
#include "ivbench/iv/profile.hpp"
#include "ivbench/harness/metrics.hpp"
#include "ivbench/harness/stats.hpp"
#include "ivbench/learn/model.hpp"

namespace ivbench::harness {

// What one CI sample is: the fold-averaged value of an iteration, or every
// individual fold value (iterations * folds samples).
enum class CiSampling { per_iteration, per_fold };

struct ProtocolConfig {
    std::size_t iterations = 100;
    std::size_t folds = 3;
    std::vector<Metric> metrics{kAllMetrics.begin(), kAllMetrics.end()};
    std::size_t augment_n = 100;
    std::uint64_t seed = 99;
    double ci_level = 0.95;
    CiSampling ci_sampling = CiSampling::per_iteration;
    iv::PerturbOptions perturb;
    std::size_t jobs = 1;

    // imprecise learners
    std::size_t knd_k = 5;
    double smm_gamma = 0.0;  // <= 0 selects 1/d
    double smm_C = 1.0;
    std::size_t wsf_trees = 100;

    void validate() const;
};

nlohmann::json to_json(const ProtocolConfig& cfg);
ProtocolConfig protocol_config_from_json(const nlohmann::json& doc);
// SHA-256 of the canonical JSON encoding.
std::string config_hash(const ProtocolConfig& cfg);

enum class Condition { baseline, perturbed };
std::string_view condition_name(Condition c);

struct MetricSample {
    std::vector<double> values;
    double mean = 0.0;
    Interval ci;
};

struct ModelMetricResult {
    std::string model;
    Metric metric = Metric::accuracy;
    MetricSample baseline;
    MetricSample perturbed;
    bool robust = true;

    double gap() const { return baseline.mean - perturbed.mean; }
    const MetricSample& sample(Condition c) const { return c == Condition::baseline ? baseline : perturbed; }
};

struct EvalReport {
    std::string protocol;
    std::vector<std::string> models;
    std::vector<ModelMetricResult> results;  // ordered by (model, metric)
    nlohmann::json provenance = nlohmann::json::object();

    const ModelMetricResult& find(const std::string& model, Metric metric) const;
    bool has_model(const std::string& model) const;
};

nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& doc);
// Flat table: model,metric,condition,mean,ci_lo,ci_hi,verdict
void write_flat_table(std::ostream& out, std::span<const EvalReport> reports);

// Stratified k-fold assignment: fold index per row. Each class is shuffled
// and dealt round-robin across folds.
std::vector<std::size_t> stratified_folds(std::span<const int> y, std::size_t folds, Rng& rng);

// Per-fold outputs of one model under both conditions.
struct ConditionOutput {
    std::vector<int> predictions;
    std::vector<double> scores;
};
struct ModelOutput {
    ConditionOutput baseline;
    ConditionOutput perturbed;
};

struct FoldContext {
    std::size_t iteration = 0;
    std::size_t fold = 0;
    iv::Dataset train;
    iv::Dataset test;
    Matrix test_perturbed;  // one IV draw per test row, shared by every model
};

// Produces one ModelOutput per model name, in order. Must be safe to call
// concurrently for distinct folds.
using FoldRunner = std::function<std::vector<ModelOutput>(const FoldContext&)>;

// Shared cross-validation loop: splits, perturbs test folds, invokes the
// runner, aggregates. Deterministic in (data, profile, cfg) for any jobs.
EvalReport run_protocol(const std::string& protocol, const std::vector<std::string>& models,
                        const iv::Dataset& data, const iv::CVProfile& profile, const ProtocolConfig& cfg,
                        const FoldRunner& runner);

EvalReport evaluate_standard(const std::vector<learn::ModelSpec>& specs, const iv::Dataset& data,
                             const iv::CVProfile& profile, const ProtocolConfig& cfg);

// Augmentation-based learners. Each entry pairs a report name (ACS, ACG)
// with the base model trained on the augmented folds.
struct AugmentedModel {
    std::string name;
    learn::ModelSpec base;
};
std::vector<AugmentedModel> default_augmented_models();

EvalReport evaluate_augmented(const std::vector<AugmentedModel>& models, const iv::Dataset& data,
                              const iv::CVProfile& profile, const ProtocolConfig& cfg);

enum class ImpreciseModel { knd, smm, wsf };
std::string_view imprecise_name(ImpreciseModel m);
ImpreciseModel imprecise_from_name(std::string_view name);
inline constexpr std::array<ImpreciseModel, 3> kImpreciseModels = {ImpreciseModel::knd, ImpreciseModel::smm,
                                                                   ImpreciseModel::wsf};

EvalReport evaluate_imprecise(const std::vector<ImpreciseModel>& models, const iv::Dataset& data,
                              const iv::CVProfile& profile, const ProtocolConfig& cfg);

struct IvGapEstimate {
    double gap = 0.0;
    double standard_error = 0.0;
    std::size_t repeats = 0;
};

using BatchPredictor = std::function<std::vector<int>(const Matrix&)>;

// Monte-Carlo estimate of the mean over instances of
// E_{x' ~ N(x, Sigma)} loss(h, x', y) - loss(h, x, y) under 0-1 loss with R
// draws per instance. The standard error treats instances as fixed.
IvGapEstimate estimate_iv_gap(const BatchPredictor& predict, const Matrix& X, std::span<const int> y,
                              const iv::CVProfile& profile, std::size_t repeats, Rng& rng,
                              const iv::PerturbOptions& opts = {});
IvGapEstimate estimate_iv_gap(const learn::TrainedModel& model, const iv::Dataset& data,
                              const iv::CVProfile& profile, std::size_t repeats, Rng& rng,
                              const iv::PerturbOptions& opts = {});

}  // namespace ivbench::harness
