#include "ivbench/learn/smo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ivbench/core/error.hpp"

namespace ivbench::learn {

PrecomputedKernel::PrecomputedKernel(Matrix gram) : gram_(std::move(gram)) {
    if (gram_.rows() != gram_.cols()) throw ValidationError("Gram matrix must be square");
}

CachedKernel::CachedKernel(std::size_t n, EntryFn entry, std::size_t cache_bytes)
    : n_(n), entry_(std::move(entry)), diag_(n) {
    for (std::size_t i = 0; i < n_; ++i) diag_[i] = entry_(i, i);
    const std::size_t row_bytes = std::max<std::size_t>(1, n_ * sizeof(double));
    capacity_rows_ = std::max<std::size_t>(2, cache_bytes / row_bytes);
}

std::span<const double> CachedKernel::row(std::size_t i) {
    if (auto it = index_.find(i); it != index_.end()) {
        lru_.splice(lru_.begin(), lru_, it->second);
        return lru_.front().second;
    }
    std::vector<double> values;
    if (lru_.size() >= capacity_rows_) {
        auto& victim = lru_.back();
        index_.erase(victim.first);
        values = std::move(victim.second);
        lru_.pop_back();
    }
    values.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) values[j] = j == i ? diag_[i] : entry_(i, j);
    lru_.emplace_front(i, std::move(values));
    index_[i] = lru_.begin();
    return lru_.front().second;
}

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

SmoSolution solve_svm_dual(KernelSource& kernel, std::span<const int> labels, const SmoOptions& options) {
    const std::size_t n = kernel.size();
    if (labels.size() != n) throw ValidationError("label count does not match kernel size");
    if (!(options.C > 0.0)) throw ValidationError("C must be positive");
    const double C = options.C;

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == 1 ? 1.0 : -1.0;

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // G = Q a - e
    std::vector<double> qd(n);
    for (std::size_t i = 0; i < n; ++i) qd[i] = kernel.diagonal(i);

    const std::size_t max_iter =
        options.max_iterations ? options.max_iterations : std::max<std::size_t>(10'000'000, 100 * n);

    auto in_up = [&](std::size_t t) { return y[t] > 0 ? alpha[t] < C : alpha[t] > 0; };
    auto in_low = [&](std::size_t t) { return y[t] > 0 ? alpha[t] > 0 : alpha[t] < C; };

    SmoSolution sol;
    std::size_t iter = 0;
    double gap = 0.0;
    for (; iter < max_iter; ++iter) {
        // i: maximal violator in I_up.
        double gmax = -kInf;
        std::ptrdiff_t i_sel = -1;
        for (std::size_t t = 0; t < n; ++t) {
            if (in_up(t) && -y[t] * grad[t] >= gmax) {
                gmax = -y[t] * grad[t];
                i_sel = static_cast<std::ptrdiff_t>(t);
            }
        }
        if (i_sel < 0) {
            gap = 0.0;
            break;
        }
        const auto i = static_cast<std::size_t>(i_sel);
        const auto ki = kernel.row(i);

        // j: second-order selection in I_low.
        double gmax2 = -kInf;
        double obj_min = kInf;
        std::ptrdiff_t j_sel = -1;
        for (std::size_t t = 0; t < n; ++t) {
            if (!in_low(t)) continue;
            const double yg = -y[t] * grad[t];
            gmax2 = std::max(gmax2, -yg);
            const double grad_diff = gmax - yg;
            if (grad_diff > 0) {
                double quad = qd[i] + qd[t] - 2.0 * ki[t];
                if (quad <= 0) quad = kTau;
                const double obj = -(grad_diff * grad_diff) / quad;
                if (obj <= obj_min) {
                    obj_min = obj;
                    j_sel = static_cast<std::ptrdiff_t>(t);
                }
            }
        }
        gap = gmax + gmax2;
        if (gap < options.tolerance || j_sel < 0) break;
        const auto j = static_cast<std::size_t>(j_sel);
        const auto kj = kernel.row(j);
        // ki may have been evicted by fetching kj only if the cache holds <2 rows.
        const auto ki2 = kernel.row(i);

        const double old_ai = alpha[i];
        const double old_aj = alpha[j];
        const double qij = y[i] * y[j] * ki2[j];
        if (y[i] != y[j]) {
            double quad = qd[i] + qd[j] + 2.0 * qij;
            if (quad <= 0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = -diff;
            }
            if (diff > 0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else if (alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            double quad = qd[i] + qd[j] - 2.0 * qij;
            if (quad <= 0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else if (alpha[j] < 0) {
                alpha[j] = 0;
                alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = sum;
            }
        }
        const double dai = alpha[i] - old_ai;
        const double daj = alpha[j] - old_aj;
        for (std::size_t t = 0; t < n; ++t) {
            grad[t] += y[t] * (y[i] * ki2[t] * dai + y[j] * kj[t] * daj);
        }
    }

    // Bias from free vectors, or the midpoint of the feasible interval.
    double ub = kInf, lb = -kInf, sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= C) {
            if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0) {
            if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    double rho = 0.0;
    if (n_free > 0) rho = sum_free / static_cast<double>(n_free);
    else if (std::isfinite(ub) && std::isfinite(lb)) rho = 0.5 * (ub + lb);
    else if (std::isfinite(ub)) rho = ub;
    else if (std::isfinite(lb)) rho = lb;

    sol.alpha = std::move(alpha);
    sol.bias = -rho;
    sol.iterations = iter;
    sol.converged = iter < max_iter;
    sol.kkt_gap = gap;
    return sol;
}

}  // namespace ivbench::learn
