#include "ivbench/robust/imprecise.hpp"

#include <algorithm>
#include <cmath>

#include "ivbench/core/error.hpp"

namespace ivbench::robust {

bool ImpreciseInstance::crisp() const {
    return std::all_of(scale.begin(), scale.end(), [](double s) { return s == 0.0; });
}

ImpreciseInstance imprecisiate(std::span<const double> x, int y, const iv::CVProfile& profile, Scheme scheme,
                               const iv::PerturbOptions& opts) {
    ImpreciseInstance inst;
    inst.scale = iv::build_sigma(x, y, profile, opts);
    inst.center.assign(x.begin(), x.end());
    inst.label = y;
    inst.scheme = scheme;
    return inst;
}

std::vector<ImpreciseInstance> imprecisiate_rows(const Matrix& X, std::span<const int> y,
                                                 const iv::CVProfile& profile, Scheme scheme,
                                                 const iv::PerturbOptions& opts) {
    if (X.rows() != y.size()) throw ValidationError("row count and label count differ");
    std::vector<ImpreciseInstance> out;
    out.reserve(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) out.push_back(imprecisiate(X.row(i), y[i], profile, scheme, opts));
    return out;
}

Matrix centers_of(std::span<const ImpreciseInstance> instances) {
    Matrix out;
    for (const auto& inst : instances) out.append_row(inst.center);
    return out;
}

std::vector<int> labels_of(std::span<const ImpreciseInstance> instances) {
    std::vector<int> out;
    out.reserve(instances.size());
    for (const auto& inst : instances) out.push_back(inst.label);
    return out;
}

double gauss_membership(double x, double a, double b) {
    if (b == 0.0) return x == a ? 1.0 : 0.0;
    const double z = (x - a) / b;
    return std::exp(-z * z);
}

double possibility(const ImpreciseInstance& inst, std::span<const double> x) {
    if (x.size() != inst.dimension()) throw ValidationError("point dimension does not match instance");
    double m = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) m = std::min(m, gauss_membership(x[j], inst.center[j], inst.scale[j]));
    return m;
}

std::pair<double, double> alpha_cut_interval(double a, double b, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in (0, 1]");
    const double half = b * std::sqrt(-std::log(alpha));
    return {a - half, a + half};
}

AlphaCutDraw alpha_cut_sample(const ImpreciseInstance& inst, Rng& rng) {
    AlphaCutDraw draw;
    draw.alpha = 1.0 - uniform01(rng);  // (0, 1]
    draw.label = inst.label;
    draw.point.resize(inst.dimension());
    const double radius = std::sqrt(-std::log(draw.alpha));
    for (std::size_t j = 0; j < inst.dimension(); ++j) {
        const double u = uniform01(rng);
        const double half = inst.scale[j] * radius;
        draw.point[j] = half > 0.0 ? inst.center[j] + (2.0 * u - 1.0) * half : inst.center[j];
    }
    return draw;
}

}  // namespace ivbench::robust
