#pragma once

#include <istream>
#include <string>
#include <vector>

#include "ivbench/core/random.hpp"
#include "ivbench/iv/profile.hpp"

namespace ivbench::iv {

// Replicate measurements taken at one time step; each inner vector has one
// value per feature.
struct TimeStep {
    std::vector<std::vector<double>> replicates;
    std::string step_id;  // identifier from the source file; empty means 1-based position
};

struct SubjectRecord {
    std::string subject_id;
    std::vector<TimeStep> steps;
};

struct LongitudinalStudy {
    std::vector<std::string> feature_names;
    std::vector<SubjectRecord> subjects;

    // Every subject needs >= 2 steps, every step >= 2 replicates, and every
    // replicate one finite value per feature. Errors name the subject/step.
    void validate() const;
};

struct FeatureComponents {
    double iv_sd = 0.0;
    double av_sd = 0.0;
    double bv_sd = 0.0;
    double homeostatic_estimate = 0.0;
    // Pooled variance fell below the analytical variance; bv_sd clamped to 0.
    bool negative_biological_variance = false;
};

struct SubjectComponents {
    std::string subject_id;
    std::vector<FeatureComponents> features;
};

struct IVComponents {
    std::vector<std::string> feature_names;
    std::vector<SubjectComponents> subjects;

    bool any_negative_biological_variance() const;
};

// IV = sample SD of all of a subject's values; AV = root of the mean per-step
// replicate sample variance; BV = sqrt(IV^2 - AV^2); homeostatic point =
// pooled mean.
IVComponents estimate_iv_components(const LongitudinalStudy& study);

// Averages the per-subject ratios CVA = AV/x^, CVI = BV/x^, CVT = IV/x^ over
// subjects. The CVI/CVT vectors are stored under `class_label`.
CVProfile coefficients_of_variation(const IVComponents& components, int class_label = 0);

// Simulates a study with known CVs using the perturbation sampler: a
// homeostatic point per subject, biological draws per step (CVI of
// `class_label`), and analytical draws per replicate (CVA).
LongitudinalStudy simulate_study(const std::vector<double>& homeostatic_means, const CVProfile& profile,
                                 int class_label, std::size_t subjects, std::size_t steps,
                                 std::size_t replicates, Rng& rng);

// Delimited text with header "subject,step,replicate,<feature>...". Rows may
// come in any order; steps and replicates are grouped by their identifiers.
LongitudinalStudy read_study(std::istream& in, char delimiter = ',');
void write_study(std::ostream& out, const LongitudinalStudy& study, char delimiter = ',');

}  // namespace ivbench::iv
