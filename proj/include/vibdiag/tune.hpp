#ifndef VIBDIAG_TUNE_HPP
#define VIBDIAG_TUNE_HPP

#include "vibdiag/dataset.hpp"
#include "vibdiag/forest.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace vibdiag {

struct TuneParam {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    bool integer = false; // evaluated values are rounded to the nearest integer
};

struct TuneSpace {
    std::vector<TuneParam> params;
    std::size_t budget = 0; // total objective evaluations, must be ≥ 2 + dim
};

struct TuneTrial {
    std::vector<double> values; // raw parameter space, integers already rounded
    double objective = 0.0;
};

struct TuneResult {
    std::vector<double> best_values;
    double best_objective = 0.0;
    std::vector<TuneTrial> trials;
    bool flat = false; // every trial scored the same; best_values is trial 0
};

/// Maximizes a deterministic objective with a Gaussian-process surrogate.
/// Parameters are normalized to [0,1]; the kernel is squared-exponential
/// with per-dimension length scales picked by marginal likelihood on a small
/// grid, observation noise floor 1e-6. The first max(5, dim+1) trials come
/// from a seeded (rotated) Halton design; each later trial maximizes
/// expected improvement over 1024 seeded uniform candidates. Fully
/// deterministic for a fixed (space, objective, seed).
TuneResult tune_bayesian(const TuneSpace& space,
                         const std::function<double(const std::vector<double>&)>& objective,
                         std::uint64_t seed);

/// Mean stratified k-fold CV accuracy of a forest on `data` — the tuning
/// objective. Folds and per-fold training seeds derive from `seed` only, so
/// the value is a pure function of (data, hp, folds, seed).
double cv_accuracy(const LabeledDataset& data, const ForestHyperparams& hp, std::size_t folds,
                   std::uint64_t seed);

/// The forest search space: n_trees [10,300], max_depth [2,32],
/// min_samples_leaf [1,16], features_per_split [1, feature_count].
TuneSpace forest_space(std::size_t feature_count, std::size_t budget);

struct ForestTuneResult {
    ForestHyperparams best;
    TuneResult log;
};

ForestTuneResult tune_forest(const LabeledDataset& train, std::size_t budget, std::uint64_t seed,
                             std::size_t cv_folds = 5);

} // namespace vibdiag

#endif
