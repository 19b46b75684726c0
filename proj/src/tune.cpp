#include "vibdiag/tune.hpp"

#include "vibdiag/detail/rng.hpp"
#include "vibdiag/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vibdiag {

namespace {

constexpr double kNoiseFloor = 1e-6;
constexpr double kTwoPi = 6.283185307179586476925286766559;

// Row-major symmetric n×n matrix → lower-triangular Cholesky factor in place.
bool cholesky_in_place(std::vector<double>& a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) sum -= a[i * n + k] * a[j * n + k];
            if (i == j) {
                if (sum <= 0.0) return false;
                a[i * n + i] = std::sqrt(sum);
            } else {
                a[i * n + j] = sum / a[j * n + j];
            }
        }
    }
    return true;
}

void solve_lower(const std::vector<double>& L, std::size_t n, std::vector<double>& b) {
    for (std::size_t i = 0; i < n; ++i) {
        double sum = b[i];
        for (std::size_t k = 0; k < i; ++k) sum -= L[i * n + k] * b[k];
        b[i] = sum / L[i * n + i];
    }
}

void solve_lower_transposed(const std::vector<double>& L, std::size_t n, std::vector<double>& b) {
    for (std::size_t i = n; i-- > 0;) {
        double sum = b[i];
        for (std::size_t k = i + 1; k < n; ++k) sum -= L[k * n + i] * b[k];
        b[i] = sum / L[i * n + i];
    }
}

double sq_exp_kernel(const double* a, const double* b, const std::vector<double>& scales) {
    double q = 0.0;
    for (std::size_t d = 0; d < scales.size(); ++d) {
        const double diff = (a[d] - b[d]) / scales[d];
        q += diff * diff;
    }
    return std::exp(-0.5 * q);
}

struct GpFit {
    std::vector<double> chol;  // L such that LLᵀ = K + noise·I
    std::vector<double> alpha; // (K + noise·I)⁻¹ y
    std::vector<double> scales;
    double log_marginal = -std::numeric_limits<double>::infinity();
};

// Fits the GP for fixed length scales, escalating the diagonal jitter from
// the 1e-6 noise floor only if the factorization fails (duplicate points).
bool fit_gp(const std::vector<double>& x, std::size_t n, std::size_t dim,
            const std::vector<double>& y, const std::vector<double>& scales, GpFit& out) {
    std::vector<double> base(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            base[i * n + j] = base[j * n + i] =
                sq_exp_kernel(&x[i * dim], &x[j * dim], scales);

    for (double jitter = kNoiseFloor; jitter <= 1e-2; jitter *= 10.0) {
        std::vector<double> k = base;
        for (std::size_t i = 0; i < n; ++i) k[i * n + i] += jitter;
        if (!cholesky_in_place(k, n)) continue;

        std::vector<double> alpha = y;
        solve_lower(k, n, alpha);
        double log_det_half = 0.0, quad = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            log_det_half += std::log(k[i * n + i]);
            quad += alpha[i] * alpha[i]; // yᵀK⁻¹y = ‖L⁻¹y‖²
        }
        solve_lower_transposed(k, n, alpha);

        out.chol = std::move(k);
        out.alpha = std::move(alpha);
        out.scales = scales;
        out.log_marginal = -0.5 * quad - log_det_half -
                           0.5 * static_cast<double>(n) * std::log(kTwoPi);
        return true;
    }
    return false;
}

// Length scales by coordinate ascent of the marginal likelihood on a small
// grid — two sweeps are plenty for the handful of points a tuning run sees.
GpFit fit_gp_with_scale_search(const std::vector<double>& x, std::size_t n, std::size_t dim,
                               const std::vector<double>& y) {
    static constexpr double kGrid[] = {0.1, 0.25, 0.5, 1.0, 2.0};
    std::vector<double> scales(dim, 0.5);
    GpFit best;
    if (!fit_gp(x, n, dim, y, scales, best))
        throw InvariantError("surrogate covariance not positive definite");
    for (int sweep = 0; sweep < 2; ++sweep) {
        for (std::size_t d = 0; d < dim; ++d) {
            for (double candidate : kGrid) {
                if (candidate == best.scales[d]) continue;
                std::vector<double> trial_scales = best.scales;
                trial_scales[d] = candidate;
                GpFit trial;
                if (fit_gp(x, n, dim, y, trial_scales, trial) &&
                    trial.log_marginal > best.log_marginal)
                    best = std::move(trial);
            }
        }
    }
    return best;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(kTwoPi); }

double radical_inverse(std::size_t index, std::size_t base) {
    double fraction = 1.0, result = 0.0;
    while (index > 0) {
        fraction /= static_cast<double>(base);
        result += fraction * static_cast<double>(index % base);
        index /= base;
    }
    return result;
}

constexpr std::size_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

} // namespace

TuneResult tune_bayesian(const TuneSpace& space,
                         const std::function<double(const std::vector<double>&)>& objective,
                         std::uint64_t seed) {
    const std::size_t dim = space.params.size();
    if (dim == 0) throw DataError("empty hyperparameter space");
    if (dim > std::size(kPrimes))
        throw DataError("hyperparameter space has too many dimensions");
    for (const TuneParam& p : space.params)
        if (!(p.hi >= p.lo)) throw DataError("parameter '" + p.name + "' has hi < lo");
    if (space.budget < 2 + dim)
        throw DataError("tuning budget must be at least 2 + dimension = " +
                        std::to_string(2 + dim));

    // Snap a unit-cube point to the raw space (rounding integer params) and
    // back, so the surrogate sees exactly the point that was evaluated.
    auto snap = [&](std::vector<double>& unit) -> std::vector<double> {
        std::vector<double> raw(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            const TuneParam& p = space.params[d];
            const double span = p.hi - p.lo;
            if (span == 0.0) {
                unit[d] = 0.5;
                raw[d] = p.lo;
                continue;
            }
            double r = p.lo + unit[d] * span;
            if (p.integer) r = static_cast<double>(std::llround(r));
            r = std::clamp(r, p.lo, p.hi);
            raw[d] = r;
            unit[d] = (r - p.lo) / span;
        }
        return raw;
    };

    TuneResult result;
    std::vector<double> x; // evaluated points, normalized, n×dim
    std::vector<double> y; // raw objective values
    auto evaluate_point = [&](std::vector<double> unit) {
        const std::vector<double> raw = snap(unit);
        const double value = objective(raw);
        x.insert(x.end(), unit.begin(), unit.end());
        y.push_back(value);
        result.trials.push_back({raw, value});
    };

    // Initial design: Halton points shifted by a seeded per-dimension offset
    // (a torus rotation keeps the low-discrepancy structure but varies with
    // the seed).
    std::vector<double> rotation(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        detail::SplitMix64 rng(detail::mix_seed(seed, detail::kStreamInit, d));
        rotation[d] = detail::next_unit(rng);
    }
    const std::size_t n_init = std::min(std::max<std::size_t>(5, dim + 1), space.budget);
    for (std::size_t i = 0; i < n_init; ++i) {
        std::vector<double> unit(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            const double h = radical_inverse(i + 1, kPrimes[d]) + rotation[d];
            unit[d] = h - std::floor(h);
        }
        evaluate_point(std::move(unit));
    }

    for (std::size_t trial = n_init; trial < space.budget; ++trial) {
        const std::size_t n = y.size();
        // Standardize observations for the surrogate.
        double mean = 0.0;
        for (double v : y) mean += v;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double v : y) var += (v - mean) * (v - mean);
        double sd = std::sqrt(var / static_cast<double>(n));
        if (sd == 0.0) sd = 1.0;
        std::vector<double> y_std(n);
        for (std::size_t i = 0; i < n; ++i) y_std[i] = (y[i] - mean) / sd;
        const double incumbent = *std::max_element(y_std.begin(), y_std.end());

        const GpFit gp = fit_gp_with_scale_search(x, n, dim, y_std);

        detail::SplitMix64 rng(detail::mix_seed(seed, detail::kStreamTrial, trial));
        std::vector<double> best_unit(dim, 0.5);
        double best_ei = -1.0;
        std::vector<double> kstar(n), v(n);
        for (std::size_t c = 0; c < 1024; ++c) {
            std::vector<double> unit(dim);
            for (std::size_t d = 0; d < dim; ++d) unit[d] = detail::next_unit(rng);

            for (std::size_t i = 0; i < n; ++i)
                kstar[i] = sq_exp_kernel(&x[i * dim], unit.data(), gp.scales);
            double mu = 0.0;
            for (std::size_t i = 0; i < n; ++i) mu += kstar[i] * gp.alpha[i];
            v = kstar;
            solve_lower(gp.chol, n, v);
            double variance = 1.0;
            for (std::size_t i = 0; i < n; ++i) variance -= v[i] * v[i];
            const double sigma = variance > 0.0 ? std::sqrt(variance) : 0.0;

            double ei;
            if (sigma < 1e-12) {
                ei = std::max(0.0, mu - incumbent);
            } else {
                const double z = (mu - incumbent) / sigma;
                ei = (mu - incumbent) * normal_cdf(z) + sigma * normal_pdf(z);
            }
            if (ei > best_ei) {
                best_ei = ei;
                best_unit = unit;
            }
        }
        evaluate_point(std::move(best_unit));
    }

    const auto [min_it, max_it] = std::minmax_element(y.begin(), y.end());
    if (*min_it == *max_it) {
        result.flat = true;
        result.best_values = result.trials.front().values;
        result.best_objective = result.trials.front().objective;
    } else {
        const std::size_t best = static_cast<std::size_t>(max_it - y.begin());
        result.best_values = result.trials[best].values;
        result.best_objective = result.trials[best].objective;
    }
    return result;
}

double cv_accuracy(const LabeledDataset& data, const ForestHyperparams& hp, std::size_t folds,
                   std::uint64_t seed) {
    data.validate();
    const std::vector<std::size_t> fold_of = stratified_folds(data.labels, folds, seed);

    double accuracy_sum = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
        LabeledDataset fold_train;
        fold_train.meta = data.meta;
        std::vector<std::size_t> val_rows;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (fold_of[i] == f) {
                val_rows.push_back(i);
            } else {
                fold_train.rows.push_back(data.rows[i]);
                fold_train.labels.push_back(data.labels[i]);
            }
        }
        const ForestModel model =
            train_forest(fold_train, hp, detail::mix_seed(seed, detail::kStreamCvTrain, f));
        std::size_t correct = 0;
        for (std::size_t i : val_rows)
            if (predict(model, data.rows[i]).class_name == data.labels[i]) ++correct;
        accuracy_sum += static_cast<double>(correct) / static_cast<double>(val_rows.size());
    }
    return accuracy_sum / static_cast<double>(folds);
}

TuneSpace forest_space(std::size_t feature_count, std::size_t budget) {
    if (feature_count == 0) throw DataError("cannot tune over zero features");
    TuneSpace space;
    space.budget = budget;
    space.params = {
        {"n_trees", 10.0, 300.0, true},
        {"max_depth", 2.0, 32.0, true},
        {"min_samples_leaf", 1.0, 16.0, true},
        {"features_per_split", 1.0, static_cast<double>(feature_count), true},
    };
    return space;
}

namespace {

ForestHyperparams hp_from_values(const std::vector<double>& v) {
    ForestHyperparams hp;
    hp.n_trees = static_cast<std::size_t>(v[0]);
    hp.max_depth = static_cast<std::size_t>(v[1]);
    hp.min_samples_leaf = static_cast<std::size_t>(v[2]);
    hp.features_per_split = static_cast<std::size_t>(v[3]);
    return hp;
}

} // namespace

ForestTuneResult tune_forest(const LabeledDataset& train, std::size_t budget, std::uint64_t seed,
                             std::size_t cv_folds) {
    train.validate();
    const TuneSpace space = forest_space(train.feature_count(), budget);
    auto objective = [&](const std::vector<double>& values) {
        return cv_accuracy(train, hp_from_values(values), cv_folds, seed);
    };
    ForestTuneResult result;
    result.log = tune_bayesian(space, objective, seed);
    result.best = hp_from_values(result.log.best_values);
    return result;
}

} // namespace vibdiag
