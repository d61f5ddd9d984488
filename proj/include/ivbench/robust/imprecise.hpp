#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ivbench/core/matrix.hpp"
#include "ivbench/core/random.hpp"
#include "ivbench/iv/perturbation.hpp"
#include "ivbench/iv/profile.hpp"

namespace ivbench::robust {

enum class Scheme {
    prob,  // N(center, diag(scale^2))
    poss,  // Gaussian fuzzy vector, membership exp(-(x - a)^2 / b^2) per coordinate
};

// A crisp instance mapped to a distribution over instances. The label stays a
// point mass.
struct ImpreciseInstance {
    std::vector<double> center;
    std::vector<double> scale;
    int label = 0;
    Scheme scheme = Scheme::prob;

    std::size_t dimension() const noexcept { return center.size(); }
    bool crisp() const;
};

// center = x, scale = build_sigma(x, y, profile).
ImpreciseInstance imprecisiate(std::span<const double> x, int y, const iv::CVProfile& profile, Scheme scheme,
                               const iv::PerturbOptions& opts = {});

std::vector<ImpreciseInstance> imprecisiate_rows(const Matrix& X, std::span<const int> y,
                                                 const iv::CVProfile& profile, Scheme scheme,
                                                 const iv::PerturbOptions& opts = {});

Matrix centers_of(std::span<const ImpreciseInstance> instances);
std::vector<int> labels_of(std::span<const ImpreciseInstance> instances);

// exp(-(x - a)^2 / b^2); a zero width is the indicator of {a}.
double gauss_membership(double x, double a, double b);

// Joint membership of x under the min-combination of coordinates.
double possibility(const ImpreciseInstance& inst, std::span<const double> x);

// [a - b sqrt(-ln alpha), a + b sqrt(-ln alpha)] for alpha in (0, 1].
std::pair<double, double> alpha_cut_interval(double a, double b, double alpha);

struct AlphaCutDraw {
    std::vector<double> point;
    int label = 0;
    double alpha = 1.0;
};

// alpha ~ U(0, 1], then a point uniform on the box formed by the per-coordinate
// alpha-cuts. Always consumes 1 + d uniforms from rng.
AlphaCutDraw alpha_cut_sample(const ImpreciseInstance& inst, Rng& rng);

}  // namespace ivbench::robust
