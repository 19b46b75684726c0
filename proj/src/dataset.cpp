#include "vibdiag/dataset.hpp"

#include "vibdiag/detail/rng.hpp"
#include "vibdiag/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace vibdiag {

std::string DatasetMeta::describe() const {
    std::ostringstream os;
    os << "k=" << k << " m=" << m << " wavelet=" << wavelet << " fs=" << sample_rate
       << " window=" << window;
    return os.str();
}

void LabeledDataset::validate() const {
    if (rows.size() != labels.size())
        throw InvariantError("dataset has " + std::to_string(rows.size()) + " rows but " +
                             std::to_string(labels.size()) + " labels");
    if (rows.empty()) throw DataError("empty dataset");
    const std::size_t width = rows[0].size();
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].size() != width)
            throw DataError("row " + std::to_string(i) + " has " +
                            std::to_string(rows[i].size()) + " features, expected " +
                            std::to_string(width));
}

std::vector<std::string> LabeledDataset::class_names() const {
    std::vector<std::string> names(labels);
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return names;
}

namespace {

// Seeded Fisher–Yates; std::shuffle's draw pattern is not pinned by the
// standard, and split determinism is part of the contract.
void shuffle_indices(std::vector<std::size_t>& idx, detail::SplitMix64& rng) {
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[detail::next_below(rng, i)]);
}

std::map<std::string, std::vector<std::size_t>> group_by_class(
    const std::vector<std::string>& labels) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
    return groups;
}

} // namespace

std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& dataset,
                                                        double train_fraction,
                                                        std::uint64_t seed) {
    dataset.validate();
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw DataError("train fraction must lie strictly between 0 and 1");

    std::vector<bool> in_train(dataset.size(), false);
    std::size_t class_idx = 0;
    for (auto& [label, indices] : group_by_class(dataset.labels)) {
        if (indices.size() < 2)
            throw DataError("class '" + label + "' has fewer than 2 samples; cannot split");
        detail::SplitMix64 rng(detail::mix_seed(seed, detail::kStreamSplit, class_idx++));
        std::vector<std::size_t> order = indices;
        shuffle_indices(order, rng);
        auto take = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(order.size())));
        take = std::clamp<std::size_t>(take, 1, order.size() - 1);
        for (std::size_t i = 0; i < take; ++i) in_train[order[i]] = true;
    }

    LabeledDataset train, test;
    train.meta = test.meta = dataset.meta;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        LabeledDataset& side = in_train[i] ? train : test;
        side.rows.push_back(dataset.rows[i]);
        side.labels.push_back(dataset.labels[i]);
    }
    return {std::move(train), std::move(test)};
}

std::vector<std::size_t> stratified_folds(const std::vector<std::string>& labels,
                                          std::size_t n_folds, std::uint64_t seed) {
    if (n_folds < 2) throw DataError("cross-validation needs at least 2 folds");
    if (labels.empty()) throw DataError("no labels to fold");

    std::vector<std::size_t> fold_of(labels.size(), 0);
    std::size_t class_idx = 0;
    for (auto& [label, indices] : group_by_class(labels)) {
        if (indices.size() < n_folds)
            throw DataError("class '" + label + "' has " + std::to_string(indices.size()) +
                            " samples, fewer than " + std::to_string(n_folds) + " folds");
        detail::SplitMix64 rng(detail::mix_seed(seed, detail::kStreamFold, class_idx++));
        std::vector<std::size_t> order = indices;
        shuffle_indices(order, rng);
        for (std::size_t i = 0; i < order.size(); ++i) fold_of[order[i]] = i % n_folds;
    }
    return fold_of;
}

} // namespace vibdiag
