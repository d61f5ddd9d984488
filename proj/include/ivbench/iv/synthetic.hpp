#pragma once

#include <array>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "ivbench/core/random.hpp"
#include "ivbench/iv/dataset.hpp"

namespace ivbench::iv {

// Class-conditional independent Gaussian marginals. Index 0/1 of the
// per-class arrays is the class label.
struct SyntheticSpec {
    std::vector<std::string> feature_names;
    std::array<std::vector<double>, 2> mean_by_class;
    std::array<std::vector<double>, 2> sd_by_class;
    double prevalence = 0.53;  // P(label = 1)
    std::size_t instances = 1422;
    std::uint64_t seed = 99;

    void validate() const;

    // Copy with class 1 marginals replaced by class 0 ones (no signal).
    SyntheticSpec without_class_signal() const;

    // Blood-panel reference marginals; class 0 keeps the tabulated means.
    // Class 1 is shifted on LY, WBC, NE and AST, and those four features get
    // their own within-class SD (shared by both classes).
    static SyntheticSpec blood_panel_default();
};

nlohmann::json to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& doc);
SyntheticSpec read_synthetic_spec(const std::string& path);

// Labels ~ Bernoulli(prevalence); features ~ N(mean_c, sd_c^2) independently.
Dataset synthesize_dataset(const SyntheticSpec& spec, Rng& rng);

// Convenience: seeds the generator from spec.seed.
Dataset synthesize_dataset(const SyntheticSpec& spec);

}  // namespace ivbench::iv
