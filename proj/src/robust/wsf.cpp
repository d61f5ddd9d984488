#include "ivbench/robust/wsf.hpp"

#include "ivbench/core/error.hpp"
#include "ivbench/learn/ensembles.hpp"

namespace ivbench::robust {

std::uint64_t WsfEnsemble::realization_seed(std::uint64_t seed, std::size_t t) { return derive_seed(seed, {t, 2}); }

WsfEnsemble WsfEnsemble::fit(std::span<const ImpreciseInstance> train, const Options& opts, std::uint64_t seed) {
    if (train.empty()) throw ValidationError("WSF needs a non-empty training set");
    if (opts.n_estimators == 0) throw ValidationError("WSF ensemble size must be >= 1");
    const auto n = train.size();
    const auto d = train.front().dimension();
    for (const auto& inst : train) {
        if (inst.dimension() != d) throw ValidationError("WSF training instances differ in dimension");
    }
    auto tree_opts = opts.tree;
    if (tree_opts.max_features == 0) tree_opts.max_features = learn::sqrt_features(d);

    WsfEnsemble ens;
    ens.dim_ = d;
    for (std::size_t t = 0; t < opts.n_estimators; ++t) {
        std::vector<std::size_t> drawn;
        std::vector<std::size_t> oob;
        if (opts.bootstrap) {
            const auto counts = learn::VotingForest::bootstrap_counts(seed, t, n);
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[i] == 0) oob.push_back(i);
                for (std::size_t c = 0; c < counts[i]; ++c) drawn.push_back(i);
            }
        } else {
            drawn.resize(n);
            for (std::size_t i = 0; i < n; ++i) drawn[i] = i;
        }
        // Each draw gets its own alpha, duplicates included.
        Rng realize = Rng(realization_seed(seed, t));
        Matrix X(drawn.size(), d);
        std::vector<double> target(drawn.size());
        for (std::size_t r = 0; r < drawn.size(); ++r) {
            const auto sample = alpha_cut_sample(train[drawn[r]], realize);
            std::copy(sample.point.begin(), sample.point.end(), X.row(r).begin());
            target[r] = static_cast<double>(sample.label);
        }
        std::vector<std::size_t> rows(drawn.size());
        for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
        const std::vector<double> weights(rows.size(), 1.0);
        const auto tree_seed = learn::VotingForest::tree_seed(seed, t);
        Rng tree_rng(tree_seed);
        ens.trees_.push_back(learn::fit_tree(X, target, rows, weights, tree_opts, tree_rng).tree);
        ens.tree_seeds_.push_back(tree_seed);
        ens.oob_.push_back(std::move(oob));
    }
    return ens;
}

double WsfEnsemble::score(std::span<const double> x) const {
    if (x.size() != dim_) throw ValidationError("query dimension does not match the WSF ensemble");
    std::size_t ones = 0;
    for (const auto& t : trees_) ones += static_cast<std::size_t>(t.vote(x));
    return static_cast<double>(ones) / static_cast<double>(trees_.size());
}

std::vector<double> WsfEnsemble::score(std::span<const ImpreciseInstance> queries) const {
    std::vector<double> out;
    out.reserve(queries.size());
    for (const auto& q : queries) out.push_back(score(q));
    return out;
}

std::vector<int> WsfEnsemble::predict(std::span<const ImpreciseInstance> queries) const {
    std::vector<int> out;
    out.reserve(queries.size());
    for (const auto& q : queries) out.push_back(predict(q));
    return out;
}

std::vector<OobRecord> WsfEnsemble::per_tree_oob(std::span<const ImpreciseInstance> train) const {
    std::vector<OobRecord> out;
    for (std::size_t t = 0; t < trees_.size(); ++t) {
        OobRecord rec;
        rec.sample_size = oob_[t].size();
        std::size_t wrong = 0;
        for (auto i : oob_[t]) wrong += trees_[t].vote(train[i].center) != train[i].label ? 1 : 0;
        rec.error_rate = rec.sample_size ? static_cast<double>(wrong) / static_cast<double>(rec.sample_size) : 0.0;
        out.push_back(rec);
    }
    return out;
}

double WsfEnsemble::oob_error(std::span<const ImpreciseInstance> train) const {
    std::vector<std::size_t> votes(train.size(), 0), total(train.size(), 0);
    for (std::size_t t = 0; t < trees_.size(); ++t) {
        for (auto i : oob_[t]) {
            votes[i] += static_cast<std::size_t>(trees_[t].vote(train[i].center));
            ++total[i];
        }
    }
    std::size_t counted = 0, wrong = 0;
    for (std::size_t i = 0; i < train.size(); ++i) {
        if (total[i] == 0) continue;
        ++counted;
        const int pred = 2 * votes[i] > total[i] ? 1 : 0;
        wrong += pred != train[i].label ? 1 : 0;
    }
    if (counted == 0) throw ValidationError("no instance is out of bag; OOB error undefined");
    return static_cast<double>(wrong) / static_cast<double>(counted);
}

}  // namespace ivbench::robust
