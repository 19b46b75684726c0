#ifndef VIBDIAG_DATASET_HPP
#define VIBDIAG_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace vibdiag {

/// Extraction parameters that travel with every feature set and model so a
/// model can refuse features produced under different settings.
struct DatasetMeta {
    std::size_t k = 0;
    std::size_t m = 0;
    std::string wavelet;
    double sample_rate = 0.0;
    std::size_t window = 0;

    bool operator==(const DatasetMeta&) const = default;
    std::string describe() const;
};

struct LabeledDataset {
    std::vector<std::vector<double>> rows; // one feature vector per sample
    std::vector<std::string> labels;       // parallel to rows
    DatasetMeta meta;

    std::size_t size() const { return rows.size(); }
    std::size_t feature_count() const { return rows.empty() ? 0 : rows[0].size(); }
    void validate() const; // row/label agreement, rectangular shape
    std::vector<std::string> class_names() const; // sorted unique labels
};

/// Stratified train/test split: each class is shuffled independently and
/// contributes round(n_c · train_fraction) samples (clamped so both sides
/// keep at least one) to the training side. Sample order within each side
/// follows the original dataset order.
std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& dataset,
                                                        double train_fraction,
                                                        std::uint64_t seed);

/// Stratified fold assignment for cross-validation: per class, samples are
/// shuffled and dealt round-robin, so fold class proportions match the
/// dataset's. Returns fold index per sample.
std::vector<std::size_t> stratified_folds(const std::vector<std::string>& labels,
                                          std::size_t n_folds, std::uint64_t seed);

} // namespace vibdiag

#endif
