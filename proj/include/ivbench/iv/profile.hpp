#pragma once

#include <map>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

namespace ivbench::iv {

// Per-feature coefficients of variation: one analytical vector shared by all
// classes and one within-subject biological vector per class label.
// Entries are dimensionless fractions (0.03 means 3%).
struct CVProfile {
    std::vector<std::string> feature_names;
    std::vector<double> cva;
    std::map<int, std::vector<double>> cvi_by_class;
    // Optional: mean per-subject total CV, filled in when the profile was
    // estimated from longitudinal data. build_sigma never reads it.
    std::map<int, std::vector<double>> cvt_by_class;

    std::size_t dimension() const noexcept { return feature_names.size(); }
    bool has_class(int label) const { return cvi_by_class.contains(label); }

    // sqrt(cva^2 + cvi_label^2), elementwise.
    std::vector<double> total_cv(int label) const;
    // Elementwise max of total_cv over every class with an entry; used when
    // perturbation must not read the true label.
    std::vector<double> class_agnostic_total_cv() const;

    // Throws ValidationError on negative or non-finite entries or mismatched sizes.
    void validate() const;

    // Returns a copy restricted/reordered to `names`. Throws listing the names
    // the profile does not cover.
    CVProfile select(std::span<const std::string> names) const;

    static CVProfile zeros(std::vector<std::string> names, std::vector<int> classes = {0, 1});
};

nlohmann::json to_json(const CVProfile& profile);
CVProfile profile_from_json(const nlohmann::json& doc);

CVProfile read_profile(const std::string& path);
void write_profile(const CVProfile& profile, const std::string& path);

// Analytical and biological CVs for the 18 laboratory features of the
// COVID-19 blood-panel benchmark (healthy = class 0, positive = class 1).
const CVProfile& blood_panel_profile();

}  // namespace ivbench::iv
