#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ivbench/core/error.hpp"
#include "ivbench/core/random.hpp"
#include "ivbench/harness/metrics.hpp"
#include "ivbench/harness/protocol.hpp"
#include "ivbench/harness/stats.hpp"
#include "ivbench/iv/profile.hpp"
#include "ivbench/iv/synthetic.hpp"

using namespace ivbench;
using namespace ivbench::harness;

namespace {

double brute_auc(const std::vector<int>& y, const std::vector<double>& s) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (y[i] != 1 || y[j] != 0) continue;
            den += 1.0;
            num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        }
    }
    return num / den;
}

double brute_ks(const std::vector<double>& a, const std::vector<double>& b) {
    auto ecdf = [](const std::vector<double>& v, double t) {
        return static_cast<double>(std::count_if(v.begin(), v.end(), [&](double x) { return x <= t; })) /
               static_cast<double>(v.size());
    };
    double best = 0.0;
    for (const auto& v : {a, b})
        for (double t : v) best = std::max(best, std::abs(ecdf(a, t) - ecdf(b, t)));
    return best;
}

iv::Dataset small_synthetic(std::size_t n = 150) {
    auto spec = iv::SyntheticSpec::blood_panel_default();
    spec.instances = n;
    return iv::synthesize_dataset(spec);
}

ProtocolConfig quick_config() {
    ProtocolConfig cfg;
    cfg.iterations = 3;
    cfg.augment_n = 2;
    cfg.wsf_trees = 10;
    return cfg;
}

std::vector<learn::ModelSpec> quick_specs() {
    std::vector<learn::ModelSpec> specs;
    for (auto kind : learn::kStandardKinds) {
        auto s = learn::ModelSpec::defaults(kind);
        if (s.hyperparameters.contains("n_estimators")) s = s.with("n_estimators", 10);
        specs.push_back(s);
    }
    return specs;
}

}  // namespace

TEST_SUITE("metrics") {
    TEST_CASE("perfect predictions") {
        const std::vector<int> y{0, 1, 1, 0, 1};
        const std::vector<double> s{0.1, 0.9, 0.8, 0.2, 0.7};
        const auto m = compute_metrics(y, y, s);
        CHECK(m.accuracy == 1.0);
        CHECK(m.f1 == 1.0);
        CHECK(m.auc.value() == 1.0);
    }

    TEST_CASE("AUC matches the pair count") {
        const std::vector<int> y{0, 0, 1, 1};
        const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
        CHECK(roc_auc(y, s).value() == 0.75);
        auto rng = make_rng(1, {});
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<int> yy(40);
            std::vector<double> ss(40);
            for (std::size_t i = 0; i < 40; ++i) {
                yy[i] = i % 3 == 0 ? 1 : 0;
                ss[i] = std::round(uniform01(rng) * 8.0) / 8.0;  // forces ties
            }
            CHECK(roc_auc(yy, ss).value() == doctest::Approx(brute_auc(yy, ss)).epsilon(1e-12));
        }
        const std::vector<int> one{1, 1};
        CHECK_FALSE(roc_auc(one, std::vector<double>{0.2, 0.3}).has_value());
    }

    TEST_CASE("F1 and accuracy") {
        const std::vector<int> y{1, 1, 0, 0};
        CHECK(f1_score(y, std::vector<int>{0, 0, 0, 0}) == 0.0);
        // tp 1, fp 1, fn 1
        CHECK(f1_score(y, std::vector<int>{1, 0, 1, 0}) == doctest::Approx(0.5));
        const auto m = compute_metrics(y, std::vector<int>{1, 0, 1, 0}, std::vector<double>{0.9, 0.1, 0.8, 0.2});
        CHECK(m.accuracy == 0.5);
        CHECK(m.get(Metric::auc) == 0.5);
        CHECK_THROWS_AS(compute_metrics(y, std::vector<int>{1}, std::vector<double>{0.5}), ValidationError);
        Metrics no_auc;
        CHECK_THROWS(no_auc.get(Metric::auc));
        CHECK(metric_from_name(metric_name(Metric::f1)) == Metric::f1);
    }
}

TEST_SUITE("statistics") {
    TEST_CASE("type 7 quantiles and percentile intervals") {
        const std::vector<double> v{4, 1, 3, 2};
        CHECK(quantile(v, 0.25) == 1.75);
        CHECK(quantile(v, 0.0) == 1.0);
        CHECK(quantile(v, 1.0) == 4.0);
        const auto ci = percentile_interval(v, 0.5);
        CHECK(ci.lo == 1.75);
        CHECK(ci.hi == 3.25);
        const std::vector<double> c(10, 0.7);
        const auto z = percentile_interval(c, 0.95);
        CHECK(z.lo == 0.7);
        CHECK(z.hi == 0.7);
        CHECK_THROWS_AS(percentile_interval(std::vector<double>{1.0}, 0.95), ValidationError);
    }

    TEST_CASE("overlap rule") {
        CHECK(intervals_overlap({0.1, 0.3}, {0.2, 0.4}));
        CHECK_FALSE(intervals_overlap({0.1, 0.2}, {0.3, 0.4}));
        CHECK(intervals_overlap({0.1, 0.2}, {0.2, 0.4}));
    }

    TEST_CASE("KS examples") {
        const std::vector<double> a{1, 2, 3, 4};
        const auto same = ks_two_sample(a, a);
        CHECK(same.statistic == 0.0);
        CHECK_FALSE(same.reject);
        CHECK(ks_two_sample(a, std::vector<double>{10, 11, 12}).statistic == 1.0);
        CHECK(ks_two_sample(a, std::vector<double>{1.5, 2.5, 3.5, 4.5}).statistic == 0.25);
    }

    TEST_CASE("KS sweep equals the brute-force ECDF maximum") {
        auto rng = make_rng(3, {});
        for (int rep = 0; rep < 30; ++rep) {
            std::vector<double> a(5 + uniform_index(rng, 40)), b(5 + uniform_index(rng, 40));
            for (auto& x : a) x = std::round(standard_normal(rng) * 4.0) / 4.0;
            for (auto& x : b) x = std::round((standard_normal(rng) + 0.3) * 4.0) / 4.0;
            CHECK(ks_two_sample(a, b).statistic == doctest::Approx(brute_ks(a, b)).epsilon(1e-12));
        }
    }

    TEST_CASE("Kolmogorov survival function") {
        // Reference values of 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
        CHECK(kolmogorov_survival(1.0) == doctest::Approx(0.26999967).epsilon(1e-7));
        CHECK(kolmogorov_survival(1.3580986) == doctest::Approx(0.05).epsilon(1e-5));
        CHECK(kolmogorov_survival(0.0) == 1.0);
        CHECK(kolmogorov_survival(5.0) < 1e-20);
        auto rng = make_rng(9, {});
        std::vector<double> a(500), b(500);
        for (auto& x : a) x = standard_normal(rng);
        for (auto& x : b) x = standard_normal(rng) + 0.5;
        CHECK(ks_two_sample(a, b).reject);
    }
}

TEST_SUITE("protocol") {
    TEST_CASE("stratified folds balance each class and are reproducible") {
        std::vector<int> y(103);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = i % 4 == 0 ? 1 : 0;
        auto r1 = make_rng(5, {});
        auto r2 = make_rng(5, {});
        const auto f = stratified_folds(y, 3, r1);
        CHECK(f == stratified_folds(y, 3, r2));
        for (int c = 0; c < 2; ++c) {
            std::array<int, 3> count{};
            for (std::size_t i = 0; i < y.size(); ++i)
                if (y[i] == c) ++count[f[i]];
            const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
            CHECK(*hi - *lo <= 1);
        }
    }

    TEST_CASE("config JSON round trip, hash and validation") {
        ProtocolConfig cfg;
        cfg.iterations = 7;
        cfg.perturb.class_agnostic = true;
        cfg.ci_sampling = CiSampling::per_fold;
        const auto back = protocol_config_from_json(to_json(cfg));
        CHECK(to_json(back) == to_json(cfg));
        CHECK(config_hash(back) == config_hash(cfg));
        CHECK(config_hash(ProtocolConfig{}) != config_hash(cfg));
        ProtocolConfig bad;
        bad.iterations = 1;
        CHECK_THROWS_AS(bad.validate(), ValidationError);
        bad.ci_sampling = CiSampling::per_fold;
        CHECK_NOTHROW(bad.validate());
        bad.folds = 1;
        CHECK_THROWS_AS(bad.validate(), ValidationError);
        CHECK(ProtocolConfig{}.iterations == 100);
        CHECK(ProtocolConfig{}.augment_n == 100);
        CHECK(ProtocolConfig{}.seed == 99);
    }

    TEST_CASE("zero CV profile gives identical conditions in every protocol") {
        const auto data = small_synthetic();
        const auto zero = iv::CVProfile::zeros(data.feature_names);
        const auto cfg = quick_config();
        const std::vector<EvalReport> reports{
            evaluate_standard(quick_specs(), data, zero, cfg),
            evaluate_augmented(default_augmented_models(), data, zero, cfg),
            evaluate_imprecise({kImpreciseModels.begin(), kImpreciseModels.end()}, data, zero, cfg)};
        for (const auto& r : reports) {
            for (const auto& res : r.results) {
                CAPTURE(res.model);
                CHECK(res.baseline.values == res.perturbed.values);
                CHECK(res.gap() == 0.0);
                CHECK(res.robust);
            }
        }
    }

    TEST_CASE("single zero-CV augmentation copy reproduces the base model") {
        const auto data = small_synthetic();
        const auto zero = iv::CVProfile::zeros(data.feature_names);
        auto cfg = quick_config();
        cfg.augment_n = 1;
        const auto aug = evaluate_augmented(default_augmented_models(), data, zero, cfg);
        const auto std_ = evaluate_standard({learn::ModelSpec::defaults(learn::ModelKind::svm_rbf)}, data, zero, cfg);
        CHECK(aug.models == std::vector<std::string>{"ACS", "ACG"});
        for (auto m : kAllMetrics) CHECK(aug.find("ACS", m).baseline.values == std_.find("SVM", m).baseline.values);
    }

    TEST_CASE("reports are deterministic and independent of the worker count") {
        const auto data = small_synthetic();
        const auto profile = iv::blood_panel_profile().select(data.feature_names);
        auto cfg = quick_config();
        const auto a = to_json(evaluate_standard(quick_specs(), data, profile, cfg)).dump();
        const auto b = to_json(evaluate_standard(quick_specs(), data, profile, cfg)).dump();
        cfg.jobs = 4;
        const auto c = to_json(evaluate_standard(quick_specs(), data, profile, cfg)).dump();
        CHECK(a == b);
        CHECK(a == c);
        cfg.jobs = 1;
        const std::vector<ImpreciseModel> imp{kImpreciseModels.begin(), kImpreciseModels.end()};
        const auto i1 = to_json(evaluate_imprecise(imp, data, profile, cfg)).dump();
        cfg.jobs = 3;
        CHECK(i1 == to_json(evaluate_imprecise(imp, data, profile, cfg)).dump());
    }

    TEST_CASE("sample sizes, CIs and verdicts are consistent") {
        const auto data = small_synthetic();
        const auto profile = iv::blood_panel_profile().select(data.feature_names);
        auto cfg = quick_config();
        for (auto sampling : {CiSampling::per_iteration, CiSampling::per_fold}) {
            cfg.ci_sampling = sampling;
            const auto r = evaluate_standard(quick_specs(), data, profile, cfg);
            const std::size_t expect = sampling == CiSampling::per_iteration ? 3 : 9;
            CHECK(r.results.size() == 7 * 3);
            for (const auto& res : r.results) {
                CHECK(res.baseline.values.size() == expect);
                CHECK(res.perturbed.values.size() == expect);
                for (auto c : {Condition::baseline, Condition::perturbed}) {
                    const auto& s = res.sample(c);
                    CHECK(s.ci.lo <= s.mean);
                    CHECK(s.mean <= s.ci.hi);
                }
                CHECK(res.robust == intervals_overlap(res.baseline.ci, res.perturbed.ci));
            }
        }
    }

    TEST_CASE("report JSON and flat table") {
        const auto data = small_synthetic();
        const auto profile = iv::blood_panel_profile().select(data.feature_names);
        const auto r = evaluate_imprecise({ImpreciseModel::smm}, data, profile, quick_config());
        CHECK(r.provenance.at("smm_gamma").get<double>() == 1.0 / static_cast<double>(data.dimension()));
        CHECK(r.provenance.at("seed").get<std::uint64_t>() == 99);
        const auto back = eval_report_from_json(to_json(r));
        CHECK(to_json(back) == to_json(r));
        std::ostringstream out;
        write_flat_table(out, std::vector<EvalReport>{r});
        std::istringstream in(out.str());
        std::string line;
        std::getline(in, line);
        CHECK(line == "model,metric,condition,mean,ci_lo,ci_hi,verdict");
        std::size_t rows = 0;
        while (std::getline(in, line)) {
            ++rows;
            CHECK(line.rfind("SMM,", 0) == 0);
        }
        CHECK(rows == 3 * 2);
    }

    TEST_CASE("mismatched profile and tiny datasets are rejected") {
        const auto data = small_synthetic();
        auto names = data.feature_names;
        std::reverse(names.begin(), names.end());
        const auto shuffled = iv::blood_panel_profile().select(names);
        CHECK_THROWS_AS(evaluate_standard(quick_specs(), data, shuffled, quick_config()), ValidationError);
        const std::vector<std::size_t> rows{0, 1, 2, 3, 4};
        const auto tiny = data.subset(rows);
        const auto profile = iv::blood_panel_profile().select(data.feature_names);
        CHECK_THROWS_AS(evaluate_standard(quick_specs(), tiny, profile, quick_config()), ValidationError);
    }
}

TEST_SUITE("IV gap estimator") {
    // h(x) = 1{x > 0}; CVA = 1 makes sigma equal |x|.
    const BatchPredictor threshold = [](const Matrix& X) {
        std::vector<int> out(X.rows());
        for (std::size_t i = 0; i < X.rows(); ++i) out[i] = X(i, 0) > 0.0 ? 1 : 0;
        return out;
    };

    iv::CVProfile unit_cv() {
        auto p = iv::CVProfile::zeros({"x"});
        p.cva = {1.0};
        return p;
    }

    TEST_CASE("threshold classifier at one sigma approaches the normal tail") {
        const Matrix X{{1.0}};
        const std::vector<int> y{1};
        auto rng = make_rng(99, {});
        const auto est = estimate_iv_gap(threshold, X, y, unit_cv(), 100000, rng);
        const double phi_m1 = 0.5 * std::erfc(1.0 / std::sqrt(2.0));
        CHECK(std::abs(est.gap - phi_m1) < 0.01);
        CHECK(est.repeats == 100000);
    }

    TEST_CASE("zero CV and constant classifiers give exactly zero") {
        const Matrix X{{1.0}, {-2.0}, {0.5}};
        const std::vector<int> y{1, 0, 0};
        auto rng = make_rng(1, {});
        const auto zero = estimate_iv_gap(threshold, X, y, iv::CVProfile::zeros({"x"}), 500, rng);
        CHECK(zero.gap == 0.0);
        CHECK(zero.standard_error == 0.0);
        const BatchPredictor constant = [](const Matrix& M) { return std::vector<int>(M.rows(), 1); };
        CHECK(estimate_iv_gap(constant, X, y, unit_cv(), 500, rng).gap == 0.0);
    }

    TEST_CASE("standard error shrinks as one over root R") {
        Matrix X(20, 1);
        std::vector<int> y(20);
        for (std::size_t i = 0; i < 20; ++i) {
            X(i, 0) = 0.2 + 0.1 * static_cast<double>(i);
            y[i] = 1;
        }
        std::vector<double> logr, logse;
        for (std::size_t r : {100u, 1000u, 10000u}) {
            auto rng = make_rng(7, {r});
            const auto est = estimate_iv_gap(threshold, X, y, unit_cv(), r, rng);
            logr.push_back(std::log(static_cast<double>(r)));
            logse.push_back(std::log(est.standard_error));
        }
        const double slope = (logse[2] - logse[0]) / (logr[2] - logr[0]);
        CHECK(slope == doctest::Approx(-0.5).epsilon(0.1));
    }
}
