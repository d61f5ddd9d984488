#pragma once

#include <nlohmann/json.hpp>
#include <span>
#include <vector>

#include "ivbench/core/matrix.hpp"

namespace ivbench::learn {

// Column z-scoring fitted on training data. Zero-variance columns keep unit
// scale. A disabled standardizer is the identity.
class Standardizer {
public:
    Standardizer() = default;
    static Standardizer fit(const Matrix& X);
    static Standardizer identity(std::size_t d);

    bool enabled() const noexcept { return !mean_.empty(); }
    std::vector<double> apply(std::span<const double> x) const;
    Matrix apply(const Matrix& X) const;

    nlohmann::json to_json() const;
    static Standardizer from_json(const nlohmann::json& doc);

private:
    std::vector<double> mean_;
    std::vector<double> scale_;
};

}  // namespace ivbench::learn
