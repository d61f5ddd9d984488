// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "cli.hpp"
#include "ivbench/core/random.hpp"
#include "ivbench/harness/protocol.hpp"
#include "ivbench/harness/stats.hpp"
#include "ivbench/iv/longitudinal.hpp"
#include "ivbench/iv/perturbation.hpp"
#include "ivbench/iv/profile.hpp"
#include "ivbench/iv/synthetic.hpp"
#include "ivbench/learn/classifiers.hpp"
#include "ivbench/learn/ensembles.hpp"
#include "ivbench/robust/bound.hpp"
#include "ivbench/robust/imprecise.hpp"
#include "ivbench/robust/knd.hpp"
#include "ivbench/robust/smm.hpp"
#include "ivbench/robust/wsf.hpp"

using namespace ivbench;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& check) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " | " << o.detail << " ["
              << std::fixed << std::setprecision(1) << secs << " s]" << std::endl;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

robust::ImpreciseInstance random_instance(std::size_t d, Rng& rng, double min_scale, double max_scale) {
    robust::ImpreciseInstance a;
    for (std::size_t j = 0; j < d; ++j) {
        a.center.push_back(standard_normal(rng));
        a.scale.push_back(min_scale + (max_scale - min_scale) * uniform01(rng));
    }
    return a;
}

// ---- 1: SMM kernel vs Monte Carlo ----
Outcome smm_vs_monte_carlo() {
    const auto t0 = Clock::now();
    auto rng = make_rng(1, {});
    double worst = 0.0;
    for (int f = 0; f < 50; ++f) {
        const auto d = 1 + uniform_index(rng, 5);
        const auto a = random_instance(d, rng, 0.0, 1.0);
        const auto b = random_instance(d, rng, 0.0, 1.0);
        const double gamma = 0.2 + uniform01(rng);
        double sum = 0.0;
        for (int k = 0; k < 100000; ++k) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double u = a.center[j] + a.scale[j] * standard_normal(rng);
                const double v = b.center[j] + b.scale[j] * standard_normal(rng);
                d2 += (u - v) * (u - v);
            }
            sum += std::exp(-gamma * d2 / 2.0);
        }
        worst = std::max(worst, std::abs(robust::smm_kernel(a, b, gamma) - sum / 100000.0));
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-2 && secs < 60.0, "max |closed form - MC| = " + fmt(worst, 5) + " (<= 0.01), runtime " +
                                              fmt(secs, 1) + " s (< 60)"};
}

// ---- 2: KND vs dense matrix formula ----
Outcome knd_vs_matrix() {
    auto rng = make_rng(2, {});
    double worst = 0.0;
    for (int f = 0; f < 100; ++f) {
        const auto d = 1 + uniform_index(rng, 6);
        const auto a = random_instance(d, rng, 0.1, 2.0);
        const auto b = random_instance(d, rng, 0.1, 2.0);
        // Dense M = (S1^-1 + S2^-1) / 2 built entrywise, then D^T M D.
        std::vector<std::vector<double>> m(d, std::vector<double>(d, 0.0));
        for (std::size_t j = 0; j < d; ++j)
            m[j][j] = 0.5 * (1.0 / (a.scale[j] * a.scale[j]) + 1.0 / (b.scale[j] * b.scale[j]));
        double oracle = 0.0;
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c)
                oracle += (a.center[r] - b.center[r]) * m[r][c] * (a.center[c] - b.center[c]);
        const double got = robust::knd_distance(a, b).value;
        worst = std::max(worst, std::abs(got - oracle) / std::max(oracle, 1e-300));
    }
    return {worst <= 1e-10, "max relative error " + [&] {
                std::ostringstream s;
                s << std::scientific << std::setprecision(2) << worst;
                return s.str();
            }() + " over 100 fixtures (<= 1e-10)"};
}

// ---- 3: CV round trip ----
Outcome cv_round_trip() {
    auto p = iv::CVProfile::zeros({"F"});
    p.cva = {0.03};
    p.cvi_by_class[0] = {0.10};
    p.cvi_by_class[1] = {0.10};
    auto estimate = [&] {
        auto rng = make_rng(99, {});
        const auto st = iv::simulate_study({50.0}, p, 0, 30, 10, 2, rng);
        return iv::coefficients_of_variation(iv::estimate_iv_components(st));
    };
    const auto e1 = estimate();
    const auto e2 = estimate();
    const double cva = e1.cva[0];
    const double cvi = e1.cvi_by_class.at(0)[0];
    const double ra = std::abs(cva - 0.03) / 0.03;
    const double ri = std::abs(cvi - 0.10) / 0.10;
    const bool same = e1.cva == e2.cva && e1.cvi_by_class == e2.cvi_by_class;
    return {ra < 0.10 && ri < 0.10 && same, "CVA " + fmt(cva) + " (rel err " + fmt(ra, 3) + "), CVI " + fmt(cvi) +
                                                " (rel err " + fmt(ri, 3) + "), repeat run identical: " +
                                                (same ? "yes" : "no")};
}

// ---- 4: KS distribution preservation ----
Outcome ks_preservation() {
    const auto t0 = Clock::now();
    const auto d = iv::synthesize_dataset(iv::SyntheticSpec::blood_panel_default());
    const auto profile = iv::blood_panel_profile().select(d.feature_names);
    auto rng = make_rng(99, {});
    const auto xp = iv::perturb_rows(d.X, d.y, profile, rng);
    bool ok = d.size() == 1422;
    std::string detail;
    for (const char* name : {"LY", "WBC", "NE", "AST"}) {
        const auto j = static_cast<std::size_t>(
            std::find(d.feature_names.begin(), d.feature_names.end(), name) - d.feature_names.begin());
        const auto ks = harness::ks_two_sample(d.X.column(j), xp.column(j), 0.01);
        ok = ok && !ks.reject;
        detail += std::string(name) + " p=" + fmt(ks.p_value, 3) + (ks.reject ? " (reject) " : " ");
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 10.0;
    return {ok, detail + "| n=" + std::to_string(d.size()) + ", runtime " + fmt(secs, 2) + " s (< 10)"};
}

// Shared benchmark runs for criteria 5, 6 and 9.
struct BenchRuns {
    fs::path dir;
    double standard_seconds = 0.0;
    harness::EvalReport standard;
};

const harness::ModelMetricResult& auc_of(const harness::EvalReport& r, const std::string& model) {
    return r.find(model, harness::Metric::auc);
}

bool disjoint(const harness::ModelMetricResult& r) { return !harness::intervals_overlap(r.baseline.ci, r.perturbed.ci); }

// ---- 5: fragility ----
Outcome fragility(const BenchRuns& runs) {
    bool lower = true;
    std::string detail;
    for (const auto& m : runs.standard.models) {
        const auto& r = auc_of(runs.standard, m);
        lower = lower && r.perturbed.mean < r.baseline.mean;
        detail += m + " " + fmt(r.baseline.mean, 3) + "->" + fmt(r.perturbed.mean, 3) + "; ";
    }
    const auto& svm = auc_of(runs.standard, "SVM");
    const auto& gb = auc_of(runs.standard, "GB");
    auto ci = [](const harness::Interval& i) { return "[" + fmt(i.lo, 3) + "," + fmt(i.hi, 3) + "]"; };
    detail += "all perturbed < baseline: " + std::string(lower ? "yes" : "no") + "; SVM CIs " +
              ci(svm.baseline.ci) + " vs " + ci(svm.perturbed.ci) + (disjoint(svm) ? " disjoint" : " overlap") +
              "; GB CIs " + ci(gb.baseline.ci) + " vs " + ci(gb.perturbed.ci) +
              (disjoint(gb) ? " disjoint" : " overlap") + "; runtime " + fmt(runs.standard_seconds, 1) +
              " s (< 600)";
    return {lower && disjoint(svm) && disjoint(gb) && runs.standard_seconds < 600.0, detail};
}

// ---- 6: mitigation ----
Outcome mitigation(const BenchRuns& runs, std::size_t augment_n) {
    const auto t0 = Clock::now();
    const auto data = iv::synthesize_dataset(iv::SyntheticSpec::blood_panel_default());
    const auto profile = iv::blood_panel_profile().select(data.feature_names);
    harness::ProtocolConfig cfg;
    cfg.iterations = 10;
    cfg.augment_n = augment_n;
    cfg.metrics = {harness::Metric::auc};
    const auto aug = harness::evaluate_augmented(harness::default_augmented_models(), data, profile, cfg);
    const auto imp = harness::evaluate_imprecise({harness::ImpreciseModel::knd, harness::ImpreciseModel::wsf}, data,
                                                 profile, cfg);
    const double secs = seconds_since(t0) + runs.standard_seconds;

    double min_standard = 1e9;
    for (const auto& m : runs.standard.models) min_standard = std::min(min_standard, auc_of(runs.standard, m).gap());
    const double g_svm = auc_of(runs.standard, "SVM").gap();
    const double g_gb = auc_of(runs.standard, "GB").gap();
    const auto& acs = auc_of(aug, "ACS");
    const auto& acg = auc_of(aug, "ACG");
    const auto& wsf = auc_of(imp, "WSF");
    const auto& knd = auc_of(imp, "KND");
    const bool c1 = acs.gap() < g_svm;
    const bool c2 = acg.gap() < g_gb;
    const bool c3 = wsf.gap() < min_standard && knd.gap() < min_standard;
    const bool c4 = acs.robust && acg.robust && wsf.robust;
    const std::string detail =
        "gap ACS " + fmt(acs.gap()) + " vs SVM " + fmt(g_svm) + (c1 ? " ok" : " X") + "; gap ACG " +
        fmt(acg.gap()) + " vs GB " + fmt(g_gb) + (c2 ? " ok" : " X") + "; gap WSF " + fmt(wsf.gap()) + ", KND " +
        fmt(knd.gap()) + " vs min standard " + fmt(min_standard) + (c3 ? " ok" : " X") +
        "; ACS/ACG/WSF CIs overlap: " + (c4 ? "yes" : "no") + "; augment n=" + std::to_string(augment_n) +
        "; runtime " + fmt(secs, 1) + " s (< 1800)";
    return {c1 && c2 && c3 && c4 && secs < 1800.0, detail};
}

// ---- 7: IV gap estimator ----
Outcome iv_gap() {
    const harness::BatchPredictor threshold = [](const Matrix& X) {
        std::vector<int> out(X.rows());
        for (std::size_t i = 0; i < X.rows(); ++i) out[i] = X(i, 0) > 0.0 ? 1 : 0;
        return out;
    };
    auto unit = iv::CVProfile::zeros({"x"});
    unit.cva = {1.0};
    const Matrix X{{1.0}};
    const std::vector<int> y{1};
    auto rng = make_rng(99, {});
    const auto est = harness::estimate_iv_gap(threshold, X, y, unit, 100000, rng);
    const double phi = 0.5 * std::erfc(1.0 / std::sqrt(2.0));
    const auto zero = harness::estimate_iv_gap(threshold, X, y, iv::CVProfile::zeros({"x"}), 1000, rng);
    const bool ok = std::abs(est.gap - phi) <= 0.01 && zero.gap == 0.0;
    return {ok, "estimate " + fmt(est.gap) + " vs Phi(-1) " + fmt(phi) + " (|diff| <= 0.01); zero-CV estimate " +
                    fmt(zero.gap, 1)};
}

// ---- 8: bound calculator ----
Outcome bound() {
    const double kl = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
    const double expect = std::exp(-10.0 * kl);
    const double got = robust::chernoff_majority_bound(0.25, 10).bound;
    bool mono = true;
    for (double p = 0.005; p < 0.5; p += 0.005) {
        for (std::size_t n = 1; n < 300; ++n) {
            const double b = robust::chernoff_majority_bound(p, n).bound;
            mono = mono && robust::chernoff_majority_bound(p, n + 1).bound < b;
            mono = mono && robust::chernoff_majority_bound(std::min(p + 0.005, 0.5), n).bound >= b;
        }
    }
    const bool ok = std::abs(got - expect) <= 1e-9 && mono;
    return {ok, "bound " + fmt(got, 10) + " vs " + fmt(expect, 10) + "; monotone over p in (0, 0.5), n in [1, 300]: " +
                    (mono ? "yes" : "no")};
}

// ---- 9: CLI determinism ----
Outcome determinism(BenchRuns& runs) {
    std::vector<std::string> args{"bench", "--synthetic", "--protocol", "standard", "--iterations", "10", "--seed",
                                  "99", "--out-dir"};
    std::ostringstream sink;
    const auto t0 = Clock::now();
    auto a = args;
    a.push_back((runs.dir / "run_a").string());
    const int ca = cli::run(a, sink, sink);
    runs.standard_seconds = seconds_since(t0);
    auto b = args;
    b.push_back((runs.dir / "run_b").string());
    const int cb = cli::run(b, sink, sink);
    if (ca != 0 || cb != 0) return {false, "bench exited with " + std::to_string(ca) + "/" + std::to_string(cb)};
    runs.standard = harness::eval_report_from_json(nlohmann::json::parse(slurp(runs.dir / "run_a" / "report_standard.json")));
    const auto ta = slurp(runs.dir / "run_a" / "report.csv");
    const auto tb = slurp(runs.dir / "run_b" / "report.csv");
    const bool same = !ta.empty() && ta == tb;
    return {same, "report.csv " + std::to_string(ta.size()) + " bytes, identical: " + (same ? "yes" : "no")};
}

// ---- 10: degeneracies ----
Outcome degeneracy() {
    auto spec = iv::SyntheticSpec::blood_panel_default();
    spec.instances = 200;
    const auto data = iv::synthesize_dataset(spec);
    const auto zero = iv::CVProfile::zeros(data.feature_names);
    harness::ProtocolConfig cfg;
    cfg.iterations = 3;
    cfg.augment_n = 2;
    cfg.wsf_trees = 20;
    std::vector<learn::ModelSpec> specs;
    for (auto k : learn::kStandardKinds) specs.push_back(learn::ModelSpec::defaults(k));
    const std::vector<harness::EvalReport> reports{
        harness::evaluate_standard(specs, data, zero, cfg),
        harness::evaluate_augmented(harness::default_augmented_models(), data, zero, cfg),
        harness::evaluate_imprecise({harness::kImpreciseModels.begin(), harness::kImpreciseModels.end()}, data, zero,
                                    cfg)};
    std::size_t checked = 0;
    bool zero_gap = true;
    for (const auto& r : reports) {
        for (const auto& res : r.results) {
            ++checked;
            zero_gap = zero_gap && res.gap() == 0.0 && res.baseline.values == res.perturbed.values;
        }
    }

    // Crisp fixtures: predictions of the imprecise learners vs crisp counterparts.
    auto rng = make_rng(10, {});
    std::vector<robust::ImpreciseInstance> train, queries;
    for (int i = 0; i < 120; ++i) {
        auto inst = random_instance(3, rng, 0.0, 0.0);
        inst.label = inst.center[0] + 0.5 * inst.center[1] > 0 ? 1 : 0;
        (i < 80 ? train : queries).push_back(inst);
    }
    const auto X = robust::centers_of(train);
    const auto y = robust::labels_of(train);
    std::size_t agree_knd = 0, agree_smm = 0, agree_wsf = 0;
    const auto knd = robust::KndClassifier::fit(train, 5);
    const auto knn = learn::KNearestNeighbors::train(X, y, 5, false);
    robust::SmmClassifier::Options so;
    so.gamma = 0.6;
    so.standardize = false;
    const auto smm = robust::SmmClassifier::fit(train, so);
    const auto svm = learn::SvmRbf::train(X, y, {1.0, 0.3, 1e-3, false});
    robust::WsfEnsemble::Options wo;
    wo.n_estimators = 25;
    auto crisp_poss = train;
    for (auto& t : crisp_poss) t.scheme = robust::Scheme::poss;
    const auto wsf = robust::WsfEnsemble::fit(crisp_poss, wo, 99);
    learn::TreeOptions topts = wo.tree;
    topts.max_features = learn::sqrt_features(3);
    std::vector<learn::DecisionTree> trees;
    for (std::size_t t = 0; t < wo.n_estimators; ++t) {
        const auto counts = learn::VotingForest::bootstrap_counts(99, t, X.rows());
        Matrix rows(0, 3);
        std::vector<double> target;
        for (std::size_t i = 0; i < X.rows(); ++i)
            for (std::size_t c = 0; c < counts[i]; ++c) {
                rows.append_row(X.row(i));
                target.push_back(y[i]);
            }
        std::vector<std::size_t> idx(target.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        const std::vector<double> w(idx.size(), 1.0);
        Rng trng(learn::VotingForest::tree_seed(99, t));
        trees.push_back(learn::fit_tree(rows, target, idx, w, topts, trng).tree);
    }
    const auto forest = learn::VotingForest::from_trees(trees, 3);
    for (const auto& q : queries) {
        agree_knd += knd.predict(q) == learn::decide(knn->score_kind(), knn->score_one(q.center)) ? 1 : 0;
        agree_smm += smm.predict(q) == learn::decide(svm->score_kind(), svm->score_one(q.center)) ? 1 : 0;
        agree_wsf += wsf.predict(q) == learn::decide(forest->score_kind(), forest->score_one(q.center)) ? 1 : 0;
    }
    const auto nq = queries.size();
    const bool crisp = agree_knd == nq && agree_smm == nq && agree_wsf == nq;
    return {zero_gap && crisp, std::to_string(checked) + " model/metric results with zero gap: " +
                                   (zero_gap ? "yes" : "no") + "; crisp agreement KND " + std::to_string(agree_knd) +
                                   "/" + std::to_string(nq) + ", SMM " + std::to_string(agree_smm) + "/" +
                                   std::to_string(nq) + ", WSF " + std::to_string(agree_wsf) + "/" +
                                   std::to_string(nq)};
}

}  // namespace

int main(int argc, char** argv) {
    // Optional first argument: perturbed copies per row for the augmentation
    // learners in criterion 6.
    std::size_t augment_n = 30;
    if (argc > 1) augment_n = static_cast<std::size_t>(std::stoul(argv[1]));

    BenchRuns runs;
    runs.dir = fs::temp_directory_path() / "ivbench_acceptance";
    fs::remove_all(runs.dir);
    fs::create_directories(runs.dir);

    report(1, "SMM kernel closed form vs Monte Carlo", smm_vs_monte_carlo);
    report(2, "KND distance vs dense matrix formula", knd_vs_matrix);
    report(3, "CV round trip (CVA 0.03, CVI 0.10; 30x10x2)", cv_round_trip);
    report(4, "KS distribution preservation on LY, WBC, NE, AST", ks_preservation);
    // Criterion 9 runs the two CLI benches that criteria 5 and 6 reuse.
    Outcome det;
    const auto t9 = Clock::now();
    try {
        det = determinism(runs);
    } catch (const std::exception& e) {
        det = {false, std::string("exception: ") + e.what()};
    }
    const double t9s = seconds_since(t9);
    report(5, "fragility of standard models (AUC)", [&] { return fragility(runs); });
    report(6, "mitigation by augmentation and imprecisiation (AUC)", [&] { return mitigation(runs, augment_n); });
    report(7, "IV gap estimator on the threshold fixture", iv_gap);
    report(8, "majority-vote bound calculator", bound);
    report(9, "byte-identical bench tables", [&] {
        det.detail += "; both runs " + fmt(t9s, 1) + " s";
        return det;
    });
    report(10, "zero-CV degeneracy suite", degeneracy);

    std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
