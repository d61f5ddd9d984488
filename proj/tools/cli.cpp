#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ivbench/core/error.hpp"
#include "ivbench/core/text.hpp"
#include "ivbench/harness/protocol.hpp"
#include "ivbench/harness/stats.hpp"
#include "ivbench/iv/dataset.hpp"
#include "ivbench/iv/longitudinal.hpp"
#include "ivbench/iv/perturbation.hpp"
#include "ivbench/iv/profile.hpp"
#include "ivbench/iv/synthetic.hpp"
#include "manifest.hpp"

#ifndef IVBENCH_VERSION
#define IVBENCH_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;

namespace ivbench::cli {

namespace {

struct DataSource {
    std::string data_path;
    bool synthetic = false;
    std::string synthetic_spec;
};

struct Loaded {
    iv::Dataset data;
    RunManifest manifest;
};

void add_data_options(CLI::App& cmd, DataSource& src) {
    auto* data = cmd.add_option("--data", src.data_path, "Labelled CSV dataset (label column 'label')");
    auto* synth = cmd.add_flag("--synthetic", src.synthetic, "Use the bundled synthetic blood-panel benchmark");
    cmd.add_option("--synthetic-spec", src.synthetic_spec, "JSON spec overriding the synthetic benchmark")
        ->needs(synth);
    data->excludes(synth);
}

iv::Dataset load_source(const DataSource& src, RunManifest& manifest) {
    if (src.synthetic) {
        auto spec = iv::SyntheticSpec::blood_panel_default();
        if (!src.synthetic_spec.empty()) {
            spec = iv::read_synthetic_spec(src.synthetic_spec);
            manifest.inputs[src.synthetic_spec] = sha256_file(src.synthetic_spec);
        }
        manifest.config["synthetic_spec"] = iv::to_json(spec);
        return iv::synthesize_dataset(spec);
    }
    if (src.data_path.empty()) throw CLI::ValidationError("one of --data or --synthetic is required");
    auto data = iv::read_dataset(src.data_path);
    manifest.inputs[src.data_path] = sha256_file(src.data_path);
    manifest.config["ingestion"] = {{"rows_read", data.report.rows_read},
                                    {"rows_dropped", data.report.rows_dropped},
                                    {"cells_imputed", data.report.cells_imputed}};
    return data;
}

iv::CVProfile load_profile(const std::string& path, const std::vector<std::string>& features,
                           RunManifest& manifest) {
    iv::CVProfile profile = iv::blood_panel_profile();
    if (!path.empty()) {
        profile = iv::read_profile(path);
        manifest.inputs[path] = sha256_file(path);
    }
    manifest.config["profile"] = path.empty() ? std::string("builtin:blood_panel") : path;
    // Throws with the names the profile lacks.
    auto selected = profile.select(features);
    for (int label : {0, 1}) (void)selected.total_cv(label);
    return selected;
}

fs::path prepare_out_dir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

void write_output(const fs::path& dir, const std::string& name, const std::string& bytes, RunManifest& manifest) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << bytes;
    out.close();
    if (!out) throw ValidationError("failed writing " + path.string());
    manifest.outputs[name] = sha256_hex(bytes);
}

void finish(const fs::path& dir, RunManifest& manifest) {
    manifest.tool_version = IVBENCH_VERSION;
    manifest.timestamp = utc_timestamp();
    std::ofstream out(dir / "manifest.json");
    if (!out) throw ValidationError("cannot write " + (dir / "manifest.json").string());
    out << to_json(manifest).dump(2) << '\n';
}

std::string fixed(double v, int digits = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

// ---- estimate-cv ----

struct EstimateArgs {
    std::string study;
    std::string out_dir = ".";
    std::string profile_name = "profile.json";
    int class_label = 0;
};

int cmd_estimate_cv(const EstimateArgs& a, std::ostream& out) {
    RunManifest manifest;
    manifest.command = "estimate-cv";
    manifest.config = {{"study", a.study}, {"class_label", a.class_label}};
    std::ifstream in(a.study);
    if (!in) throw ValidationError("cannot open study " + a.study);
    const auto study = iv::read_study(in);
    manifest.inputs[a.study] = sha256_file(a.study);
    const auto components = iv::estimate_iv_components(study);
    const auto profile = iv::coefficients_of_variation(components, a.class_label);

    const auto dir = prepare_out_dir(a.out_dir);
    write_output(dir, a.profile_name, iv::to_json(profile).dump(2) + "\n", manifest);
    finish(dir, manifest);

    out << "feature,cvt,cva,cvi\n";
    const auto& cvi = profile.cvi_by_class.at(a.class_label);
    const auto cvt = profile.total_cv(a.class_label);
    for (std::size_t j = 0; j < profile.feature_names.size(); ++j) {
        out << profile.feature_names[j] << ',' << fixed(cvt[j]) << ',' << fixed(profile.cva[j]) << ','
            << fixed(cvi[j]) << '\n';
    }
    if (components.any_negative_biological_variance()) {
        out << "note: some subjects had pooled variance below analytical variance; their biological part was set to 0\n";
    }
    return kExitOk;
}

// ---- bench ----

struct BenchArgs {
    DataSource source;
    std::string profile;
    std::string protocol = "all";
    std::string config;
    std::optional<std::size_t> iterations, folds, augment_n, jobs;
    std::optional<std::uint64_t> seed;
    std::string ci_sampling;
    std::string out_dir = "ivbench-out";
    bool class_agnostic = false;
    bool clip_nonnegative = false;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
    RunManifest manifest;
    manifest.command = "bench";
    harness::ProtocolConfig cfg;
    if (!a.config.empty()) {
        std::ifstream in(a.config);
        if (!in) throw ValidationError("cannot open protocol config " + a.config);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("protocol config " + a.config + " is not valid JSON: " + e.what());
        }
        cfg = harness::protocol_config_from_json(doc);
        manifest.inputs[a.config] = sha256_file(a.config);
    }
    if (a.iterations) cfg.iterations = *a.iterations;
    if (a.folds) cfg.folds = *a.folds;
    if (a.augment_n) cfg.augment_n = *a.augment_n;
    if (a.seed) cfg.seed = *a.seed;
    if (a.jobs) cfg.jobs = *a.jobs;
    if (!a.ci_sampling.empty()) {
        cfg.ci_sampling = a.ci_sampling == "per_fold" ? harness::CiSampling::per_fold : harness::CiSampling::per_iteration;
    }
    if (a.class_agnostic) cfg.perturb.class_agnostic = true;
    if (a.clip_nonnegative) cfg.perturb.clip_nonnegative = true;
    cfg.validate();

    const auto data = load_source(a.source, manifest);
    const auto profile = load_profile(a.profile, data.feature_names, manifest);
    manifest.seed = cfg.seed;
    manifest.config["protocol"] = a.protocol;
    manifest.config["harness"] = harness::to_json(cfg);

    const bool all = a.protocol == "all";
    std::vector<harness::EvalReport> reports;
    if (all || a.protocol == "standard") {
        std::vector<learn::ModelSpec> specs;
        for (auto k : learn::kStandardKinds) specs.push_back(learn::ModelSpec::defaults(k));
        reports.push_back(harness::evaluate_standard(specs, data, profile, cfg));
    }
    if (all || a.protocol == "augmented") {
        reports.push_back(harness::evaluate_augmented(harness::default_augmented_models(), data, profile, cfg));
    }
    if (all || a.protocol == "imprecise") {
        std::vector<harness::ImpreciseModel> models(harness::kImpreciseModels.begin(), harness::kImpreciseModels.end());
        reports.push_back(harness::evaluate_imprecise(models, data, profile, cfg));
    }

    const auto dir = prepare_out_dir(a.out_dir);
    for (const auto& r : reports) {
        write_output(dir, "report_" + r.protocol + ".json", harness::to_json(r).dump(2) + "\n", manifest);
    }
    std::ostringstream table;
    harness::write_flat_table(table, reports);
    write_output(dir, "report.csv", table.str(), manifest);
    finish(dir, manifest);

    out << "model    metric    baseline                  perturbed                 verdict\n";
    for (const auto& r : reports) {
        for (const auto& m : r.results) {
            out << std::left << std::setw(9) << m.model << std::setw(10) << harness::metric_name(m.metric)
                << fixed(m.baseline.mean) << " [" << fixed(m.baseline.ci.lo) << ", " << fixed(m.baseline.ci.hi)
                << "]  " << fixed(m.perturbed.mean) << " [" << fixed(m.perturbed.ci.lo) << ", "
                << fixed(m.perturbed.ci.hi) << "]  " << (m.robust ? "robust" : "not robust") << '\n';
        }
    }
    out << "wrote " << (dir / "report.csv").string() << '\n';
    return kExitOk;
}

// ---- perturb ----

struct PerturbArgs {
    DataSource source;
    std::string profile;
    std::uint64_t seed = 99;
    std::string out_dir = "ivbench-out";
    std::vector<std::string> ks_features;
    double alpha = 0.01;
    bool class_agnostic = false;
    bool clip_nonnegative = false;
};

int cmd_perturb(const PerturbArgs& a, std::ostream& out) {
    RunManifest manifest;
    manifest.command = "perturb";
    manifest.seed = a.seed;
    auto data = load_source(a.source, manifest);
    const auto profile = load_profile(a.profile, data.feature_names, manifest);
    iv::PerturbOptions opts{a.class_agnostic, a.clip_nonnegative};

    std::vector<std::string> features = a.ks_features;
    if (features.empty()) {
        for (const auto* name : {"LY", "WBC", "NE", "AST"}) {
            if (std::find(data.feature_names.begin(), data.feature_names.end(), name) != data.feature_names.end()) {
                features.emplace_back(name);
            }
        }
    }
    std::vector<std::size_t> columns;
    std::string missing;
    for (const auto& f : features) {
        auto it = std::find(data.feature_names.begin(), data.feature_names.end(), f);
        if (it == data.feature_names.end()) missing += (missing.empty() ? "" : ", ") + f;
        else columns.push_back(static_cast<std::size_t>(it - data.feature_names.begin()));
    }
    if (!missing.empty()) throw ValidationError("KS features not in dataset: " + missing);
    manifest.config["ks_features"] = features;
    manifest.config["alpha"] = a.alpha;
    manifest.config["class_agnostic_cv"] = a.class_agnostic;
    manifest.config["clip_nonnegative"] = a.clip_nonnegative;

    auto rng = make_rng(a.seed, {});
    iv::Dataset perturbed = data;
    perturbed.X = iv::perturb_rows(data.X, data.y, profile, rng, opts);

    std::ostringstream ks;
    ks << "feature,statistic,p_value,reject\n";
    out << "feature  KS       p        reject@" << a.alpha << '\n';
    for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto before = data.X.column(columns[c]);
        const auto after = perturbed.X.column(columns[c]);
        const auto r = harness::ks_two_sample(before, after, a.alpha);
        ks << features[c] << ',' << format_number(r.statistic) << ',' << format_number(r.p_value) << ','
           << (r.reject ? "true" : "false") << '\n';
        out << std::left << std::setw(9) << features[c] << fixed(r.statistic) << "  " << fixed(r.p_value) << "  "
            << (r.reject ? "yes" : "no") << '\n';
    }

    const auto dir = prepare_out_dir(a.out_dir);
    std::ostringstream csv;
    iv::write_dataset(csv, perturbed);
    write_output(dir, "perturbed.csv", csv.str(), manifest);
    write_output(dir, "ks.csv", ks.str(), manifest);
    finish(dir, manifest);
    return kExitOk;
}

// ---- synthesize ----

struct SynthesizeArgs {
    std::string spec;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> instances;
    bool no_signal = false;
    std::string out_dir = "ivbench-out";
    std::string name = "synthetic.csv";
};

int cmd_synthesize(const SynthesizeArgs& a, std::ostream& out) {
    RunManifest manifest;
    manifest.command = "synthesize";
    auto spec = iv::SyntheticSpec::blood_panel_default();
    if (!a.spec.empty()) {
        spec = iv::read_synthetic_spec(a.spec);
        manifest.inputs[a.spec] = sha256_file(a.spec);
    }
    if (a.seed) spec.seed = *a.seed;
    if (a.instances) spec.instances = *a.instances;
    if (a.no_signal) spec = spec.without_class_signal();
    spec.validate();
    manifest.seed = spec.seed;
    manifest.config = {{"synthetic_spec", iv::to_json(spec)}};
    const auto data = iv::synthesize_dataset(spec);
    const auto dir = prepare_out_dir(a.out_dir);
    std::ostringstream csv;
    iv::write_dataset(csv, data);
    write_output(dir, a.name, csv.str(), manifest);
    finish(dir, manifest);
    out << "wrote " << data.size() << " rows (" << data.count_label(1) << " positive) to " << (dir / a.name).string()
        << '\n';
    return kExitOk;
}

// ---- simulate-study ----

struct SimulateArgs {
    std::string profile;
    int class_label = 0;
    std::size_t subjects = 30, steps = 10, replicates = 2;
    std::uint64_t seed = 99;
    std::optional<double> mean;
    std::optional<double> cva, cvi;
    std::size_t features = 1;
    std::string out_dir = "ivbench-out";
    std::string name = "study.csv";
};

int cmd_simulate_study(const SimulateArgs& a, std::ostream& out) {
    RunManifest manifest;
    manifest.command = "simulate-study";
    manifest.seed = a.seed;
    iv::CVProfile profile;
    if (a.cva || a.cvi) {
        if (!(a.cva && a.cvi)) throw ValidationError("--cva and --cvi must be given together");
        if (!a.profile.empty()) throw ValidationError("--profile cannot be combined with --cva/--cvi");
        profile = iv::CVProfile::zeros([&] {
            std::vector<std::string> names;
            for (std::size_t j = 0; j < a.features; ++j) names.push_back("F" + std::to_string(j + 1));
            return names;
        }());
        std::fill(profile.cva.begin(), profile.cva.end(), *a.cva);
        profile.cvi_by_class.clear();
        profile.cvi_by_class[a.class_label] = std::vector<double>(a.features, *a.cvi);
    } else if (!a.profile.empty()) {
        profile = iv::read_profile(a.profile);
        manifest.inputs[a.profile] = sha256_file(a.profile);
    } else {
        profile = iv::blood_panel_profile();
    }
    profile.validate();

    std::vector<double> means(profile.feature_names.size(), 0.0);
    const auto reference = iv::SyntheticSpec::blood_panel_default();
    for (std::size_t j = 0; j < means.size(); ++j) {
        if (a.mean) {
            means[j] = *a.mean;
            continue;
        }
        auto it = std::find(reference.feature_names.begin(), reference.feature_names.end(), profile.feature_names[j]);
        if (it == reference.feature_names.end()) {
            throw ValidationError("no reference mean for feature " + profile.feature_names[j] + "; pass --mean");
        }
        means[j] = reference.mean_by_class[0][static_cast<std::size_t>(it - reference.feature_names.begin())];
    }
    manifest.config = {{"profile", iv::to_json(profile)}, {"class_label", a.class_label}, {"subjects", a.subjects},
                       {"steps", a.steps},               {"replicates", a.replicates},   {"means", means}};
    auto rng = make_rng(a.seed, {});
    const auto study = iv::simulate_study(means, profile, a.class_label, a.subjects, a.steps, a.replicates, rng);
    const auto dir = prepare_out_dir(a.out_dir);
    std::ostringstream csv;
    iv::write_study(csv, study);
    write_output(dir, a.name, csv.str(), manifest);
    finish(dir, manifest);
    out << "wrote " << a.subjects << " subjects x " << a.steps << " steps x " << a.replicates << " replicates to "
        << (dir / a.name).string() << '\n';
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Individual-variation robustness benchmarking for tabular classifiers", "ivbench"};
    app.set_version_flag("--version", IVBENCH_VERSION);
    app.require_subcommand(1);

    EstimateArgs est;
    auto* c_est = app.add_subcommand("estimate-cv", "Estimate CVA/CVI/CVT from a longitudinal replicate study");
    c_est->add_option("--study,--data", est.study, "Study CSV: subject,step,replicate,<features>")->required();
    c_est->add_option("--out-dir", est.out_dir, "Output directory")->capture_default_str();
    c_est->add_option("--profile-name", est.profile_name, "Profile file name")->capture_default_str();
    c_est->add_option("--class-label", est.class_label, "Class the estimated CVI is filed under")
        ->capture_default_str();

    BenchArgs bench;
    auto* c_bench = app.add_subcommand("bench", "Run evaluation protocols and write reports");
    add_data_options(*c_bench, bench.source);
    c_bench->add_option("--profile", bench.profile, "CV profile JSON (default: built-in blood-panel profile)");
    c_bench->add_option("--protocol", bench.protocol, "standard | augmented | imprecise | all")
        ->check(CLI::IsMember({"standard", "augmented", "imprecise", "all"}))
        ->capture_default_str();
    c_bench->add_option("--config", bench.config, "Protocol config JSON; flags override its fields");
    c_bench->add_option("--iterations", bench.iterations, "Cross-validation repetitions [100]");
    c_bench->add_option("--folds", bench.folds, "Stratified folds per iteration [3]");
    c_bench->add_option("--augment-n", bench.augment_n, "Perturbed copies per training row for ACS/ACG [100]");
    c_bench->add_option("--seed", bench.seed, "Master seed [99]");
    c_bench->add_option("--jobs", bench.jobs, "Worker threads; output does not depend on it [1]");
    c_bench->add_option("--ci-sampling", bench.ci_sampling, "per_iteration | per_fold")
        ->check(CLI::IsMember({"per_iteration", "per_fold"}));
    c_bench->add_option("--out-dir", bench.out_dir, "Output directory")->capture_default_str();
    c_bench->add_flag("--class-agnostic-cv", bench.class_agnostic, "Use the max CVI over classes at test time");
    c_bench->add_flag("--clip-nonnegative", bench.clip_nonnegative, "Clamp perturbed values at zero");

    PerturbArgs pert;
    auto* c_pert = app.add_subcommand("perturb", "Write one IV-perturbed copy of a dataset plus a KS summary");
    add_data_options(*c_pert, pert.source);
    c_pert->add_option("--profile", pert.profile, "CV profile JSON (default: built-in blood-panel profile)");
    c_pert->add_option("--seed", pert.seed, "Seed")->capture_default_str();
    c_pert->add_option("--out-dir", pert.out_dir, "Output directory")->capture_default_str();
    c_pert->add_option("--ks-features", pert.ks_features, "Features to test (default LY WBC NE AST when present)")
        ->delimiter(',');
    c_pert->add_option("--alpha", pert.alpha, "KS significance level")->capture_default_str();
    c_pert->add_flag("--class-agnostic-cv", pert.class_agnostic, "Use the max CVI over classes");
    c_pert->add_flag("--clip-nonnegative", pert.clip_nonnegative, "Clamp perturbed values at zero");

    SynthesizeArgs syn;
    auto* c_syn = app.add_subcommand("synthesize", "Write the synthetic benchmark dataset as CSV");
    c_syn->add_option("--spec", syn.spec, "Synthetic spec JSON (default: built-in)");
    c_syn->add_option("--seed", syn.seed, "Override the spec seed");
    c_syn->add_option("--instances", syn.instances, "Override the row count");
    c_syn->add_flag("--no-signal", syn.no_signal, "Give class 1 the class 0 marginals");
    c_syn->add_option("--out-dir", syn.out_dir, "Output directory")->capture_default_str();
    c_syn->add_option("--name", syn.name, "Output file name")->capture_default_str();

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate-study", "Simulate a longitudinal replicate study from known CVs");
    c_sim->add_option("--profile", sim.profile, "CV profile JSON (default: built-in blood-panel profile)");
    c_sim->add_option("--cva", sim.cva, "Uniform analytical CV for synthetic features F1..Fd");
    c_sim->add_option("--cvi", sim.cvi, "Uniform biological CV for synthetic features F1..Fd");
    c_sim->add_option("--features", sim.features, "Feature count with --cva/--cvi")->capture_default_str();
    c_sim->add_option("--mean", sim.mean, "Homeostatic mean for every feature");
    c_sim->add_option("--class-label", sim.class_label, "Class whose CVI drives biological variation")
        ->capture_default_str();
    c_sim->add_option("--subjects", sim.subjects)->capture_default_str();
    c_sim->add_option("--steps", sim.steps)->capture_default_str();
    c_sim->add_option("--replicates", sim.replicates)->capture_default_str();
    c_sim->add_option("--seed", sim.seed)->capture_default_str();
    c_sim->add_option("--out-dir", sim.out_dir, "Output directory")->capture_default_str();
    c_sim->add_option("--name", sim.name, "Output file name")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = e.get_exit_code();
        (code == 0 ? out : err) << (code == 0 ? app.help() : std::string(e.what()) + "\n");
        if (code == 0) return kExitOk;
        err << "run with --help for usage\n";
        return kExitUsage;
    }

    try {
        if (*c_est) return cmd_estimate_cv(est, out);
        if (*c_bench) return cmd_bench(bench, out);
        if (*c_pert) return cmd_perturb(pert, out);
        if (*c_syn) return cmd_synthesize(syn, out);
        if (*c_sim) return cmd_simulate_study(sim, out);
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitUsage;
}

}  // namespace ivbench::cli
