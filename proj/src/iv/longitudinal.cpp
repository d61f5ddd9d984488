#include "ivbench/iv/longitudinal.hpp"

#include <cmath>
#include <map>
#include <ostream>

#include "ivbench/core/error.hpp"
#include "ivbench/core/text.hpp"
#include "ivbench/iv/perturbation.hpp"

namespace ivbench::iv {

namespace {

double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size() - 1);
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

void LongitudinalStudy::validate() const {
    const auto d = feature_names.size();
    if (d == 0) throw ValidationError("study has no features");
    if (subjects.empty()) throw ValidationError("study has no subjects");
    for (const auto& s : subjects) {
        if (s.steps.size() < 2) {
            throw ValidationError("subject " + s.subject_id + " has " + std::to_string(s.steps.size()) +
                                  " time step(s); at least 2 are required");
        }
        for (std::size_t t = 0; t < s.steps.size(); ++t) {
            const auto& reps = s.steps[t].replicates;
            const auto step = s.steps[t].step_id.empty() ? std::to_string(t + 1) : s.steps[t].step_id;
            if (reps.size() < 2) {
                throw ValidationError("subject " + s.subject_id + " step " + step + " has " +
                                      std::to_string(reps.size()) +
                                      " replicate(s); at least 2 are required");
            }
            for (const auto& r : reps) {
                if (r.size() != d) {
                    throw ValidationError("subject " + s.subject_id + " step " + step +
                                          ": replicate has " + std::to_string(r.size()) + " values, expected " +
                                          std::to_string(d));
                }
                for (double v : r) {
                    if (!std::isfinite(v)) {
                        throw ValidationError("subject " + s.subject_id + " step " + step +
                                              ": non-finite measurement");
                    }
                }
            }
        }
    }
}

bool IVComponents::any_negative_biological_variance() const {
    for (const auto& s : subjects) {
        for (const auto& f : s.features) {
            if (f.negative_biological_variance) return true;
        }
    }
    return false;
}

IVComponents estimate_iv_components(const LongitudinalStudy& study) {
    study.validate();
    const auto d = study.feature_names.size();
    IVComponents out;
    out.feature_names = study.feature_names;
    out.subjects.reserve(study.subjects.size());
    for (const auto& subject : study.subjects) {
        SubjectComponents sc;
        sc.subject_id = subject.subject_id;
        sc.features.resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<double> pooled;
            double step_var_sum = 0.0;
            for (const auto& step : subject.steps) {
                std::vector<double> reps;
                reps.reserve(step.replicates.size());
                for (const auto& r : step.replicates) reps.push_back(r[j]);
                step_var_sum += sample_variance(reps);
                pooled.insert(pooled.end(), reps.begin(), reps.end());
            }
            auto& fc = sc.features[j];
            const double iv_var = sample_variance(pooled);
            const double av_var = step_var_sum / static_cast<double>(subject.steps.size());
            fc.iv_sd = std::sqrt(iv_var);
            fc.av_sd = std::sqrt(av_var);
            fc.homeostatic_estimate = mean_of(pooled);
            const double bv_var = iv_var - av_var;
            if (bv_var < 0.0) {
                fc.bv_sd = 0.0;
                fc.negative_biological_variance = true;
            } else {
                fc.bv_sd = std::sqrt(bv_var);
            }
        }
        out.subjects.push_back(std::move(sc));
    }
    return out;
}

CVProfile coefficients_of_variation(const IVComponents& components, int class_label) {
    const auto d = components.feature_names.size();
    if (components.subjects.empty()) throw ValidationError("no subjects to average over");
    std::vector<double> cva(d, 0.0), cvi(d, 0.0), cvt(d, 0.0);
    for (const auto& s : components.subjects) {
        for (std::size_t j = 0; j < d; ++j) {
            const auto& f = s.features[j];
            if (!(f.homeostatic_estimate > 0.0)) {
                throw ValidationError("subject " + s.subject_id + " feature " + components.feature_names[j] +
                                      ": homeostatic estimate must be > 0 for a coefficient of variation");
            }
            cvt[j] += f.iv_sd / f.homeostatic_estimate;
            cva[j] += f.av_sd / f.homeostatic_estimate;
            cvi[j] += f.bv_sd / f.homeostatic_estimate;
        }
    }
    const auto n = static_cast<double>(components.subjects.size());
    for (std::size_t j = 0; j < d; ++j) {
        cvt[j] /= n;
        cva[j] /= n;
        cvi[j] /= n;
    }
    CVProfile p;
    p.feature_names = components.feature_names;
    p.cva = std::move(cva);
    p.cvi_by_class[class_label] = std::move(cvi);
    p.cvt_by_class[class_label] = std::move(cvt);
    return p;
}

LongitudinalStudy simulate_study(const std::vector<double>& homeostatic_means, const CVProfile& profile,
                                 int class_label, std::size_t subjects, std::size_t steps,
                                 std::size_t replicates, Rng& rng) {
    const auto d = profile.dimension();
    if (homeostatic_means.size() != d) throw ValidationError("homeostatic means do not match the profile");
    if (!profile.has_class(class_label)) {
        throw ValidationError("profile has no CVI entry for class " + std::to_string(class_label));
    }
    // Split the profile into a purely biological and a purely analytical part.
    CVProfile biological = CVProfile::zeros(profile.feature_names, {class_label});
    biological.cvi_by_class[class_label] = profile.cvi_by_class.at(class_label);
    CVProfile analytical = CVProfile::zeros(profile.feature_names, {class_label});
    analytical.cva = profile.cva;

    LongitudinalStudy study;
    study.feature_names = profile.feature_names;
    for (std::size_t i = 0; i < subjects; ++i) {
        SubjectRecord rec;
        rec.subject_id = "S" + std::to_string(i + 1);
        // Between-subject spread of homeostatic points (log-normal, 20%).
        std::vector<double> point(d);
        for (std::size_t j = 0; j < d; ++j) point[j] = homeostatic_means[j] * std::exp(0.2 * standard_normal(rng));
        for (std::size_t t = 0; t < steps; ++t) {
            const auto state = perturb(point, class_label, biological, rng);
            TimeStep step;
            for (std::size_t r = 0; r < replicates; ++r) {
                step.replicates.push_back(perturb(state, class_label, analytical, rng));
            }
            rec.steps.push_back(std::move(step));
        }
        study.subjects.push_back(std::move(rec));
    }
    return study;
}

LongitudinalStudy read_study(std::istream& in, char delimiter) {
    std::string line;
    if (!read_record_line(in, line)) throw ValidationError("longitudinal file is empty");
    const auto header = split_record(line, delimiter);
    if (header.size() < 4 || header[0] != "subject" || header[1] != "step" || header[2] != "replicate") {
        throw ValidationError("longitudinal header must start with subject,step,replicate and name >= 1 feature");
    }
    LongitudinalStudy study;
    study.feature_names.assign(header.begin() + 3, header.end());
    const auto d = study.feature_names.size();

    std::map<std::string, std::size_t> subject_index;
    std::vector<std::map<std::string, std::size_t>> step_index;
    std::size_t row = 1;
    while (read_record_line(in, line)) {
        ++row;
        const auto fields = split_record(line, delimiter);
        if (fields.size() != d + 3) {
            throw ValidationError("row " + std::to_string(row) + ": expected " + std::to_string(d + 3) +
                                  " fields, found " + std::to_string(fields.size()));
        }
        auto [sit, new_subject] = subject_index.try_emplace(fields[0], study.subjects.size());
        if (new_subject) {
            study.subjects.push_back({fields[0], {}});
            step_index.emplace_back();
        }
        auto& subject = study.subjects[sit->second];
        auto& steps = step_index[sit->second];
        auto [tit, new_step] = steps.try_emplace(fields[1], subject.steps.size());
        if (new_step) subject.steps.push_back({{}, fields[1]});
        std::vector<double> values(d);
        for (std::size_t j = 0; j < d; ++j) {
            const auto& cell = fields[j + 3];
            std::size_t used = 0;
            try {
                values[j] = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (cell.empty() || used != cell.size()) {
                throw ValidationError("row " + std::to_string(row) + ", column " + header[j + 3] +
                                      ": cannot parse '" + cell + "' (subject " + fields[0] + ", step " +
                                      fields[1] + ")");
            }
        }
        subject.steps[tit->second].replicates.push_back(std::move(values));
    }
    return study;
}

void write_study(std::ostream& out, const LongitudinalStudy& study, char delimiter) {
    out << "subject" << delimiter << "step" << delimiter << "replicate";
    for (const auto& name : study.feature_names) out << delimiter << name;
    out << '\n';
    for (const auto& s : study.subjects) {
        for (std::size_t t = 0; t < s.steps.size(); ++t) {
            for (std::size_t r = 0; r < s.steps[t].replicates.size(); ++r) {
                const auto& id = s.steps[t].step_id;
                out << s.subject_id << delimiter;
                if (id.empty()) out << t + 1;
                else out << id;
                out << delimiter << r + 1;
                for (double v : s.steps[t].replicates[r]) out << delimiter << format_number(v);
                out << '\n';
            }
        }
    }
}

}  // namespace ivbench::iv
