#pragma once

#include <cstddef>
#include <functional>
#include <list>
#include <span>
#include <unordered_map>
#include <vector>

#include "ivbench/core/matrix.hpp"

namespace ivbench::learn {

// Row access to a symmetric kernel matrix K. Spans returned by row() stay
// valid until the second-next call to row().
class KernelSource {
public:
    virtual ~KernelSource() = default;
    virtual std::size_t size() const = 0;
    virtual double diagonal(std::size_t i) const = 0;
    virtual std::span<const double> row(std::size_t i) = 0;
};

// Whole Gram matrix held in memory.
class PrecomputedKernel final : public KernelSource {
public:
    explicit PrecomputedKernel(Matrix gram);
    std::size_t size() const override { return gram_.rows(); }
    double diagonal(std::size_t i) const override { return gram_(i, i); }
    std::span<const double> row(std::size_t i) override { return gram_.row(i); }
    const Matrix& gram() const noexcept { return gram_; }

private:
    Matrix gram_;
};

// Rows computed on demand from entry(i, j) and kept in an LRU cache bounded
// by `cache_bytes` (at least two rows are always cached).
class CachedKernel final : public KernelSource {
public:
    using EntryFn = std::function<double(std::size_t, std::size_t)>;
    CachedKernel(std::size_t n, EntryFn entry, std::size_t cache_bytes = std::size_t{256} << 20);
    std::size_t size() const override { return n_; }
    double diagonal(std::size_t i) const override { return diag_[i]; }
    std::span<const double> row(std::size_t i) override;

private:
    std::size_t n_;
    EntryFn entry_;
    std::vector<double> diag_;
    std::size_t capacity_rows_;
    std::list<std::pair<std::size_t, std::vector<double>>> lru_;
    std::unordered_map<std::size_t, decltype(lru_)::iterator> index_;
};

struct SmoOptions {
    double C = 1.0;
    // Stop when the maximal KKT violation pair gap m(a) - M(a) < tolerance.
    double tolerance = 1e-3;
    // 0 selects max(10^7, 100 n).
    std::size_t max_iterations = 0;
};

struct SmoSolution {
    std::vector<double> alpha;  // dual coefficients, each in [0, C]
    double bias = 0.0;          // decision(x) = sum_i alpha_i y_i K(x_i, x) + bias
    std::size_t iterations = 0;
    bool converged = false;
    double kkt_gap = 0.0;  // m(a) - M(a) at exit
};

// C-SVC dual solved by sequential minimal optimization with second-order
// working-set selection. Labels are 0/1 and are mapped to -1/+1.
SmoSolution solve_svm_dual(KernelSource& kernel, std::span<const int> labels, const SmoOptions& options);

}  // namespace ivbench::learn
