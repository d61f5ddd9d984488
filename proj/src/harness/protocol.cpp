#include "ivbench/harness/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

#include "ivbench/core/error.hpp"
#include "ivbench/core/parallel.hpp"
#include "ivbench/core/text.hpp"
#include "ivbench/robust/augment.hpp"
#include "ivbench/robust/imprecise.hpp"
#include "ivbench/robust/knd.hpp"
#include "ivbench/robust/smm.hpp"
#include "ivbench/robust/wsf.hpp"

namespace ivbench::harness {

namespace {

// Stream tags under the master seed.
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kPerturbStream = 2;
constexpr std::uint64_t kAugmentStream = 3;
constexpr std::size_t kMaxResplits = 1000;

bool both_classes(std::span<const int> y) {
    bool zero = false, one = false;
    for (int v : y) (v == 1 ? one : zero) = true;
    return zero && one;
}

MetricSample summarize(std::vector<double> values, double level) {
    MetricSample s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    s.ci = percentile_interval(values, level);
    // Guard against the last-ulp disagreement between a mean and its bounds.
    s.ci.lo = std::min(s.ci.lo, s.mean);
    s.ci.hi = std::max(s.ci.hi, s.mean);
    s.values = std::move(values);
    return s;
}

std::string_view sampling_name(CiSampling s) { return s == CiSampling::per_iteration ? "per_iteration" : "per_fold"; }

}  // namespace

void ProtocolConfig::validate() const {
    if (iterations < 1) throw ValidationError("iterations must be at least 1");
    if (folds < 2) throw ValidationError("folds must be at least 2");
    if (!(ci_level > 0.0 && ci_level < 1.0)) throw ValidationError("CI level must lie in (0, 1)");
    if (metrics.empty()) throw ValidationError("at least one metric is required");
    if (augment_n < 1) throw ValidationError("augmentation count must be at least 1");
    if (knd_k < 1) throw ValidationError("KND k must be at least 1");
    if (!(smm_C > 0.0)) throw ValidationError("SMM C must be positive");
    if (wsf_trees < 1) throw ValidationError("WSF needs at least one tree");
    const std::size_t samples = ci_sampling == CiSampling::per_iteration ? iterations : iterations * folds;
    if (samples < 2) throw ValidationError("a confidence interval needs at least 2 samples; raise iterations");
}

nlohmann::json to_json(const ProtocolConfig& cfg) {
    nlohmann::json metrics = nlohmann::json::array();
    for (auto m : cfg.metrics) metrics.push_back(std::string(metric_name(m)));
    return {
        {"iterations", cfg.iterations},
        {"folds", cfg.folds},
        {"metrics", metrics},
        {"augment_n", cfg.augment_n},
        {"seed", cfg.seed},
        {"ci_level", cfg.ci_level},
        {"ci_sampling", std::string(sampling_name(cfg.ci_sampling))},
        {"class_agnostic_cv", cfg.perturb.class_agnostic},
        {"clip_nonnegative", cfg.perturb.clip_nonnegative},
        {"knd_k", cfg.knd_k},
        {"smm_gamma", cfg.smm_gamma},
        {"smm_C", cfg.smm_C},
        {"wsf_trees", cfg.wsf_trees},
    };
}

ProtocolConfig protocol_config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ValidationError("protocol config must be a JSON object");
    ProtocolConfig cfg;
    try {
        cfg.iterations = doc.value("iterations", cfg.iterations);
        cfg.folds = doc.value("folds", cfg.folds);
        if (doc.contains("metrics")) {
            cfg.metrics.clear();
            for (const auto& m : doc.at("metrics")) cfg.metrics.push_back(metric_from_name(m.get<std::string>()));
        }
        cfg.augment_n = doc.value("augment_n", cfg.augment_n);
        cfg.seed = doc.value("seed", cfg.seed);
        cfg.ci_level = doc.value("ci_level", cfg.ci_level);
        const auto sampling = doc.value("ci_sampling", std::string("per_iteration"));
        if (sampling == "per_iteration") cfg.ci_sampling = CiSampling::per_iteration;
        else if (sampling == "per_fold") cfg.ci_sampling = CiSampling::per_fold;
        else throw ValidationError("unknown ci_sampling '" + sampling + "'");
        cfg.perturb.class_agnostic = doc.value("class_agnostic_cv", false);
        cfg.perturb.clip_nonnegative = doc.value("clip_nonnegative", false);
        cfg.knd_k = doc.value("knd_k", cfg.knd_k);
        cfg.smm_gamma = doc.value("smm_gamma", cfg.smm_gamma);
        cfg.smm_C = doc.value("smm_C", cfg.smm_C);
        cfg.wsf_trees = doc.value("wsf_trees", cfg.wsf_trees);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed protocol config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

std::string config_hash(const ProtocolConfig& cfg) { return sha256_hex(to_json(cfg).dump()); }

std::string_view condition_name(Condition c) { return c == Condition::baseline ? "baseline" : "perturbed"; }

const ModelMetricResult& EvalReport::find(const std::string& model, Metric metric) const {
    for (const auto& r : results) {
        if (r.model == model && r.metric == metric) return r;
    }
    throw ValidationError("report has no result for " + model + "/" + std::string(metric_name(metric)));
}

bool EvalReport::has_model(const std::string& model) const {
    return std::find(models.begin(), models.end(), model) != models.end();
}

nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json results = nlohmann::json::array();
    auto sample_json = [](const MetricSample& s) {
        return nlohmann::json{{"mean", s.mean}, {"ci", {s.ci.lo, s.ci.hi}}, {"values", s.values}};
    };
    for (const auto& r : report.results) {
        results.push_back({{"model", r.model},
                           {"metric", std::string(metric_name(r.metric))},
                           {"baseline", sample_json(r.baseline)},
                           {"perturbed", sample_json(r.perturbed)},
                           {"gap", r.gap()},
                           {"robust", r.robust}});
    }
    return {{"schema", "ivbench.eval_report"},
            {"version", 1},
            {"protocol", report.protocol},
            {"models", report.models},
            {"results", results},
            {"provenance", report.provenance}};
}

EvalReport eval_report_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("schema") != "ivbench.eval_report" || doc.at("version") != 1) {
            throw ValidationError("not an ivbench.eval_report version 1 document");
        }
        EvalReport report;
        report.protocol = doc.at("protocol").get<std::string>();
        report.models = doc.at("models").get<std::vector<std::string>>();
        report.provenance = doc.at("provenance");
        auto read_sample = [](const nlohmann::json& j) {
            MetricSample s;
            s.mean = j.at("mean").get<double>();
            s.ci = {j.at("ci").at(0).get<double>(), j.at("ci").at(1).get<double>()};
            s.values = j.at("values").get<std::vector<double>>();
            return s;
        };
        for (const auto& r : doc.at("results")) {
            ModelMetricResult m;
            m.model = r.at("model").get<std::string>();
            m.metric = metric_from_name(r.at("metric").get<std::string>());
            m.baseline = read_sample(r.at("baseline"));
            m.perturbed = read_sample(r.at("perturbed"));
            m.robust = r.at("robust").get<bool>();
            report.results.push_back(std::move(m));
        }
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed eval report: ") + e.what());
    }
}

void write_flat_table(std::ostream& out, std::span<const EvalReport> reports) {
    out << "model,metric,condition,mean,ci_lo,ci_hi,verdict\n";
    for (const auto& report : reports) {
        for (const auto& r : report.results) {
            for (auto c : {Condition::baseline, Condition::perturbed}) {
                const auto& s = r.sample(c);
                out << r.model << ',' << metric_name(r.metric) << ',' << condition_name(c) << ','
                    << format_number(s.mean) << ',' << format_number(s.ci.lo) << ',' << format_number(s.ci.hi)
                    << ',' << (r.robust ? "robust" : "not_robust") << '\n';
            }
        }
    }
}

std::vector<std::size_t> stratified_folds(std::span<const int> y, std::size_t folds, Rng& rng) {
    if (folds < 2) throw ValidationError("folds must be at least 2");
    std::vector<std::size_t> assignment(y.size(), 0);
    std::size_t next = 0;
    for (int label : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] == label) members.push_back(i);
        }
        // Fisher-Yates with the library's uniform index.
        for (std::size_t i = members.size(); i > 1; --i) {
            std::swap(members[i - 1], members[uniform_index(rng, i)]);
        }
        // Continue dealing where the previous class stopped to balance fold sizes.
        for (auto idx : members) {
            assignment[idx] = next;
            next = (next + 1) % folds;
        }
    }
    return assignment;
}

EvalReport run_protocol(const std::string& protocol, const std::vector<std::string>& models,
                        const iv::Dataset& data, const iv::CVProfile& profile, const ProtocolConfig& cfg,
                        const FoldRunner& runner) {
    cfg.validate();
    data.validate();
    profile.validate();
    if (profile.feature_names != data.feature_names) {
        throw ValidationError("profile features do not match dataset features in name and order");
    }
    if (data.size() < 2 * cfg.folds) throw ValidationError("dataset too small for the requested folds");

    // Splits first, sequentially, so re-split attempts are reproducible.
    std::vector<std::vector<std::size_t>> assignments(cfg.iterations);
    std::size_t resplits = 0;
    nlohmann::json resplit_log = nlohmann::json::array();
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        for (std::size_t attempt = 0;; ++attempt) {
            if (attempt == kMaxResplits) {
                throw ValidationError("could not find folds with both classes after " +
                                      std::to_string(kMaxResplits) + " attempts");
            }
            auto rng = make_rng(cfg.seed, {kSplitStream, it, attempt});
            auto a = stratified_folds(data.y, cfg.folds, rng);
            bool ok = true;
            for (std::size_t f = 0; f < cfg.folds && ok; ++f) {
                std::vector<int> test_y, train_y;
                for (std::size_t i = 0; i < a.size(); ++i) (a[i] == f ? test_y : train_y).push_back(data.y[i]);
                ok = both_classes(test_y) && both_classes(train_y);
            }
            if (ok) {
                assignments[it] = std::move(a);
                break;
            }
            ++resplits;
            resplit_log.push_back({{"iteration", it}, {"attempt", attempt}});
        }
    }

    const std::size_t tasks = cfg.iterations * cfg.folds;
    // fold_metrics[task][model] = {baseline, perturbed}
    std::vector<std::vector<std::pair<Metrics, Metrics>>> fold_metrics(tasks);
    parallel_for(tasks, cfg.jobs, [&](std::size_t task) {
        const std::size_t it = task / cfg.folds;
        const std::size_t f = task % cfg.folds;
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < data.size(); ++i) (assignments[it][i] == f ? test_rows : train_rows).push_back(i);
        FoldContext ctx;
        ctx.iteration = it;
        ctx.fold = f;
        ctx.train = data.subset(train_rows);
        ctx.test = data.subset(test_rows);
        auto prng = make_rng(cfg.seed, {kPerturbStream, it, f});
        ctx.test_perturbed = iv::perturb_rows(ctx.test.X, ctx.test.y, profile, prng, cfg.perturb);
        auto outputs = runner(ctx);
        if (outputs.size() != models.size()) throw NumericError("fold runner returned the wrong number of models");
        auto& slot = fold_metrics[task];
        for (const auto& o : outputs) {
            slot.emplace_back(compute_metrics(ctx.test.y, o.baseline.predictions, o.baseline.scores),
                              compute_metrics(ctx.test.y, o.perturbed.predictions, o.perturbed.scores));
        }
    });

    EvalReport report;
    report.protocol = protocol;
    report.models = models;
    for (std::size_t m = 0; m < models.size(); ++m) {
        for (auto metric : cfg.metrics) {
            std::vector<double> base, pert;
            for (std::size_t it = 0; it < cfg.iterations; ++it) {
                double b = 0.0, p = 0.0;
                for (std::size_t f = 0; f < cfg.folds; ++f) {
                    const auto& [mb, mp] = fold_metrics[it * cfg.folds + f][m];
                    if (cfg.ci_sampling == CiSampling::per_fold) {
                        base.push_back(mb.get(metric));
                        pert.push_back(mp.get(metric));
                    }
                    b += mb.get(metric);
                    p += mp.get(metric);
                }
                if (cfg.ci_sampling == CiSampling::per_iteration) {
                    base.push_back(b / static_cast<double>(cfg.folds));
                    pert.push_back(p / static_cast<double>(cfg.folds));
                }
            }
            ModelMetricResult r;
            r.model = models[m];
            r.metric = metric;
            r.baseline = summarize(std::move(base), cfg.ci_level);
            r.perturbed = summarize(std::move(pert), cfg.ci_level);
            r.robust = intervals_overlap(r.baseline.ci, r.perturbed.ci);
            report.results.push_back(std::move(r));
        }
    }
    report.provenance = {{"seed", cfg.seed},
                         {"config_hash", config_hash(cfg)},
                         {"config", to_json(cfg)},
                         {"samples", data.size()},
                         {"features", data.feature_names},
                         {"resplits", resplits},
                         {"resplit_log", resplit_log}};
    return report;
}

namespace {

ModelOutput run_trained(const learn::TrainedModel& model, const FoldContext& ctx) {
    ModelOutput o;
    o.baseline.scores = model.score(ctx.test.X);
    o.baseline.predictions = model.predict(ctx.test.X);
    o.perturbed.scores = model.score(ctx.test_perturbed);
    o.perturbed.predictions = model.predict(ctx.test_perturbed);
    return o;
}

}  // namespace

EvalReport evaluate_standard(const std::vector<learn::ModelSpec>& specs, const iv::Dataset& data,
                             const iv::CVProfile& profile, const ProtocolConfig& cfg) {
    if (specs.empty()) throw ValidationError("no models to evaluate");
    std::vector<std::string> names;
    for (const auto& s : specs) {
        s.validate();
        names.emplace_back(learn::display_name(s.kind));
    }
    auto report = run_protocol("standard", names, data, profile, cfg, [&](const FoldContext& ctx) {
        std::vector<ModelOutput> out;
        for (const auto& s : specs) out.push_back(run_trained(learn::fit(s, ctx.train.X, ctx.train.y, cfg.seed), ctx));
        return out;
    });
    nlohmann::json specs_json = nlohmann::json::array();
    for (const auto& s : specs) specs_json.push_back(learn::to_json(s));
    report.provenance["model_specs"] = specs_json;
    return report;
}

std::vector<AugmentedModel> default_augmented_models() {
    return {{"ACS", learn::ModelSpec::defaults(learn::ModelKind::svm_rbf)},
            {"ACG", learn::ModelSpec::defaults(learn::ModelKind::gradient_boosting)}};
}

EvalReport evaluate_augmented(const std::vector<AugmentedModel>& models, const iv::Dataset& data,
                              const iv::CVProfile& profile, const ProtocolConfig& cfg) {
    if (models.empty()) throw ValidationError("no models to evaluate");
    std::vector<std::string> names;
    for (const auto& m : models) {
        m.base.validate();
        names.push_back(m.name);
    }
    auto report = run_protocol("augmented", names, data, profile, cfg, [&](const FoldContext& ctx) {
        // One augmented training set per fold, shared by every model.
        auto arng = make_rng(cfg.seed, {kAugmentStream, ctx.iteration, ctx.fold});
        const auto aug = robust::augment(ctx.train.X, ctx.train.y, profile, cfg.augment_n, arng, cfg.perturb);
        std::vector<ModelOutput> out;
        for (const auto& m : models) out.push_back(run_trained(learn::fit(m.base, aug.X, aug.y, cfg.seed), ctx));
        return out;
    });
    nlohmann::json specs_json = nlohmann::json::object();
    for (const auto& m : models) specs_json[m.name] = learn::to_json(m.base);
    report.provenance["model_specs"] = specs_json;
    return report;
}

std::string_view imprecise_name(ImpreciseModel m) {
    switch (m) {
        case ImpreciseModel::knd: return "KND";
        case ImpreciseModel::smm: return "SMM";
        case ImpreciseModel::wsf: return "WSF";
    }
    return "?";
}

ImpreciseModel imprecise_from_name(std::string_view name) {
    for (auto m : kImpreciseModels) {
        if (imprecise_name(m) == name) return m;
    }
    throw ValidationError("unknown imprecise model '" + std::string(name) + "'");
}

EvalReport evaluate_imprecise(const std::vector<ImpreciseModel>& models, const iv::Dataset& data,
                              const iv::CVProfile& profile, const ProtocolConfig& cfg) {
    if (models.empty()) throw ValidationError("no models to evaluate");
    std::vector<std::string> names;
    for (auto m : models) names.emplace_back(imprecise_name(m));
    const double d = static_cast<double>(data.dimension());
    const double smm_gamma = cfg.smm_gamma > 0.0 ? cfg.smm_gamma : 1.0 / d;
    std::atomic<std::size_t> smm_jittered{0};
    std::atomic<std::size_t> knd_regularized_fits{0};

    auto report = run_protocol("imprecise", names, data, profile, cfg, [&](const FoldContext& ctx) {
        std::vector<ModelOutput> out;
        for (auto m : models) {
            const auto scheme = m == ImpreciseModel::wsf ? robust::Scheme::poss : robust::Scheme::prob;
            const auto train = robust::imprecisiate_rows(ctx.train.X, ctx.train.y, profile, scheme, cfg.perturb);
            const auto test_b = robust::imprecisiate_rows(ctx.test.X, ctx.test.y, profile, scheme, cfg.perturb);
            const auto test_p =
                robust::imprecisiate_rows(ctx.test_perturbed, ctx.test.y, profile, scheme, cfg.perturb);
            ModelOutput o;
            switch (m) {
                case ImpreciseModel::knd: {
                    const auto model = robust::KndClassifier::fit(train, cfg.knd_k);
                    for (const auto& inst : train) {
                        if (std::any_of(inst.scale.begin(), inst.scale.end(), [](double s) { return s == 0.0; })) {
                            ++knd_regularized_fits;
                            break;
                        }
                    }
                    o.baseline = {model.predict(test_b), model.score(test_b)};
                    o.perturbed = {model.predict(test_p), model.score(test_p)};
                    break;
                }
                case ImpreciseModel::smm: {
                    robust::SmmClassifier::Options opts;
                    opts.gamma = smm_gamma;
                    opts.C = cfg.smm_C;
                    const auto model = robust::SmmClassifier::fit(train, opts);
                    if (model.jittered()) ++smm_jittered;
                    o.baseline = {model.predict(test_b), model.decision(test_b)};
                    o.perturbed = {model.predict(test_p), model.decision(test_p)};
                    break;
                }
                case ImpreciseModel::wsf: {
                    robust::WsfEnsemble::Options opts;
                    opts.n_estimators = cfg.wsf_trees;
                    const auto model = robust::WsfEnsemble::fit(train, opts, cfg.seed);
                    o.baseline = {model.predict(test_b), model.score(test_b)};
                    o.perturbed = {model.predict(test_p), model.score(test_p)};
                    break;
                }
            }
            out.push_back(std::move(o));
        }
        return out;
    });
    if (std::find(models.begin(), models.end(), ImpreciseModel::smm) != models.end()) {
        report.provenance["smm_gamma"] = smm_gamma;
        report.provenance["smm_jittered_fits"] = smm_jittered.load();
    }
    if (std::find(models.begin(), models.end(), ImpreciseModel::knd) != models.end()) {
        report.provenance["knd_k"] = cfg.knd_k;
        report.provenance["knd_regularized_fits"] = knd_regularized_fits.load();
    }
    if (std::find(models.begin(), models.end(), ImpreciseModel::wsf) != models.end()) {
        report.provenance["wsf_trees"] = cfg.wsf_trees;
    }
    return report;
}

IvGapEstimate estimate_iv_gap(const BatchPredictor& predict, const Matrix& X, std::span<const int> y,
                              const iv::CVProfile& profile, std::size_t repeats, Rng& rng,
                              const iv::PerturbOptions& opts) {
    if (repeats < 1) throw ValidationError("repeats must be at least 1");
    if (X.rows() != y.size()) throw ValidationError("labels and rows differ in count");
    if (X.rows() == 0) throw ValidationError("cannot estimate the IV gap on an empty sample");
    const auto base = predict(X);
    const auto n = X.rows();
    double gap = 0.0;
    double variance = 0.0;
    const double r = static_cast<double>(repeats);
    for (std::size_t i = 0; i < n; ++i) {
        Matrix draws(repeats, X.cols());
        for (std::size_t k = 0; k < repeats; ++k) {
            const auto p = iv::perturb(X.row(i), y[i], profile, rng, opts);
            std::copy(p.begin(), p.end(), draws.row(k).begin());
        }
        const auto pred = predict(draws);
        std::size_t errors = 0;
        for (int v : pred) errors += v != y[i] ? 1 : 0;
        const double mean_loss = static_cast<double>(errors) / r;
        const double base_loss = base[i] != y[i] ? 1.0 : 0.0;
        gap += mean_loss - base_loss;
        if (repeats > 1) variance += mean_loss * (1.0 - mean_loss) / (r - 1.0);
    }
    const double nn = static_cast<double>(n);
    return {gap / nn, std::sqrt(variance) / nn, repeats};
}

IvGapEstimate estimate_iv_gap(const learn::TrainedModel& model, const iv::Dataset& data,
                              const iv::CVProfile& profile, std::size_t repeats, Rng& rng,
                              const iv::PerturbOptions& opts) {
    return estimate_iv_gap([&](const Matrix& X) { return model.predict(X); }, data.X, data.y, profile, repeats,
                           rng, opts);
}

}  // namespace ivbench::harness
