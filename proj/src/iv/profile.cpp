#include "ivbench/iv/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ivbench/core/error.hpp"

namespace ivbench::iv {

namespace {

constexpr int kSchemaVersion = 1;

void check_vector(const std::vector<double>& v, std::size_t d, const std::string& what) {
    if (v.size() != d) {
        throw ValidationError(what + " has " + std::to_string(v.size()) + " entries, expected " +
                              std::to_string(d));
    }
    for (std::size_t j = 0; j < d; ++j) {
        if (!std::isfinite(v[j]) || v[j] < 0.0) {
            throw ValidationError(what + "[" + std::to_string(j) + "] must be finite and >= 0");
        }
    }
}

std::vector<double> pick(const std::vector<double>& v, std::span<const std::size_t> idx) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(v[i]);
    return out;
}

}  // namespace

std::vector<double> CVProfile::total_cv(int label) const {
    const auto it = cvi_by_class.find(label);
    if (it == cvi_by_class.end()) {
        throw ValidationError("profile has no CVI entry for class " + std::to_string(label));
    }
    std::vector<double> out(cva.size());
    for (std::size_t j = 0; j < cva.size(); ++j) out[j] = std::hypot(cva[j], it->second[j]);
    return out;
}

std::vector<double> CVProfile::class_agnostic_total_cv() const {
    std::vector<double> out(cva.size(), 0.0);
    for (const auto& [label, cvi] : cvi_by_class) {
        for (std::size_t j = 0; j < cva.size(); ++j) out[j] = std::max(out[j], std::hypot(cva[j], cvi[j]));
    }
    return out;
}

void CVProfile::validate() const {
    const auto d = feature_names.size();
    check_vector(cva, d, "cva");
    if (cvi_by_class.empty()) throw ValidationError("profile has no cvi_by_class entries");
    for (const auto& [label, cvi] : cvi_by_class) check_vector(cvi, d, "cvi[" + std::to_string(label) + "]");
    for (const auto& [label, cvt] : cvt_by_class) check_vector(cvt, d, "cvt[" + std::to_string(label) + "]");
}

CVProfile CVProfile::select(std::span<const std::string> names) const {
    std::vector<std::size_t> idx;
    std::string missing;
    for (const auto& name : names) {
        const auto it = std::find(feature_names.begin(), feature_names.end(), name);
        if (it == feature_names.end()) {
            missing += (missing.empty() ? "" : ", ") + name;
        } else {
            idx.push_back(static_cast<std::size_t>(it - feature_names.begin()));
        }
    }
    if (!missing.empty()) throw ValidationError("profile does not cover features: " + missing);
    CVProfile out;
    out.feature_names.assign(names.begin(), names.end());
    out.cva = pick(cva, idx);
    for (const auto& [label, cvi] : cvi_by_class) out.cvi_by_class[label] = pick(cvi, idx);
    for (const auto& [label, cvt] : cvt_by_class) out.cvt_by_class[label] = pick(cvt, idx);
    return out;
}

CVProfile CVProfile::zeros(std::vector<std::string> names, std::vector<int> classes) {
    CVProfile p;
    const auto d = names.size();
    p.feature_names = std::move(names);
    p.cva.assign(d, 0.0);
    for (int c : classes) p.cvi_by_class[c].assign(d, 0.0);
    return p;
}

nlohmann::json to_json(const CVProfile& profile) {
    nlohmann::json doc;
    doc["schema"] = "ivbench.cv_profile";
    doc["version"] = kSchemaVersion;
    doc["feature_names"] = profile.feature_names;
    doc["cva"] = profile.cva;
    auto& cvi = doc["cvi_by_class"] = nlohmann::json::object();
    for (const auto& [label, v] : profile.cvi_by_class) cvi[std::to_string(label)] = v;
    if (!profile.cvt_by_class.empty()) {
        auto& cvt = doc["cvt_by_class"] = nlohmann::json::object();
        for (const auto& [label, v] : profile.cvt_by_class) cvt[std::to_string(label)] = v;
    }
    return doc;
}

CVProfile profile_from_json(const nlohmann::json& doc) {
    CVProfile p;
    try {
        if (doc.contains("version") && doc.at("version").get<int>() > kSchemaVersion) {
            throw ValidationError("unsupported profile schema version");
        }
        p.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
        p.cva = doc.at("cva").get<std::vector<double>>();
        for (const auto& [key, value] : doc.at("cvi_by_class").items()) {
            p.cvi_by_class[std::stoi(key)] = value.get<std::vector<double>>();
        }
        if (doc.contains("cvt_by_class")) {
            for (const auto& [key, value] : doc.at("cvt_by_class").items()) {
                p.cvt_by_class[std::stoi(key)] = value.get<std::vector<double>>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed CV profile: ") + e.what());
    } catch (const std::logic_error& e) {
        if (dynamic_cast<const ValidationError*>(&e)) throw;
        throw ValidationError(std::string("malformed CV profile: ") + e.what());
    }
    p.validate();
    return p;
}

CVProfile read_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open profile " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("profile " + path + " is not valid JSON: " + e.what());
    }
    return profile_from_json(doc);
}

void write_profile(const CVProfile& profile, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << to_json(profile).dump(2) << '\n';
}

const CVProfile& blood_panel_profile() {
    static const CVProfile profile = [] {
        CVProfile p;
        p.feature_names = {"ALT", "AST", "ALP", "GGT", "LDH", "CK", "CA", "GLU", "UREA",
                           "CREA", "WBC", "RBC", "HCT", "NE", "LY", "MO", "EO", "BA"};
        p.cva = {0.04, 0.04, 0.05, 0.035, 0.03, 0.05, 0.03, 0.028, 0.03,
                 0.025, 0.019, 0.009, 0.018, 0.03, 0.036, 0.063, 0.079, 0.031};
        p.cvi_by_class[0] = {0.093, 0.095, 0.054, 0.089, 0.052, 0.145, 0.018, 0.047, 0.141,
                             0.044, 0.111, 0.018, 0.024, 0.146, 0.11, 0.134, 0.156, 0.128};
        p.cvi_by_class[1] = {0.051, 0.52, 0.045, 0.036, 0.024, 0.062, 0.018, 0.026, 0.035,
                             0.022, 0.033, 0.010, 0.019, 0.014, 0.043, 0.033, 0.098, 0.056};
        return p;
    }();
    return profile;
}

}  // namespace ivbench::iv
