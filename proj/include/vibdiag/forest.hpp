#ifndef VIBDIAG_FOREST_HPP
#define VIBDIAG_FOREST_HPP

#include "vibdiag/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace vibdiag {

struct ForestHyperparams {
    std::size_t n_trees = 100;
    std::size_t max_depth = 16;
    std::size_t min_samples_leaf = 1;
    std::size_t features_per_split = 0; // 0 → ceil(sqrt(feature count))

    bool operator==(const ForestHyperparams&) const = default;
};

/// One node of a decision tree. Internal nodes route by value ≤ threshold
/// (left) vs > threshold (right); thresholds are taken from observed feature
/// values, so routing depends only on the ordering of values, never on
/// midpoints between them. Leaves carry a per-class training-sample count.
struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<std::uint32_t> counts; // leaf histogram, one entry per class
};

struct DecisionTree {
    std::vector<TreeNode> nodes; // nodes[0] is the root; children follow pre-order
    const TreeNode& leaf_for(std::span<const double> features) const;
};

struct ForestModel {
    std::vector<DecisionTree> trees;
    std::vector<std::string> classes; // sorted label list; probability order
    ForestHyperparams hyperparams;
    DatasetMeta meta;
    std::size_t feature_count = 0;
    std::uint64_t train_seed = 0;

    /// Throws unless other's (k, m, wavelet, fs, window) match this model's.
    void require_compatible(const DatasetMeta& other) const;
};

/// Bagged forest of Gini-split decision trees. Per tree: a bootstrap sample
/// of n rows (with replacement), and at every node a fresh random subset of
/// features_per_split features is searched for the impurity-minimizing
/// threshold. Zero-gain splits are taken when nothing better exists, so
/// structure like XOR still separates; growth stops at max_depth, at
/// min_samples_leaf, on purity, or when no feature varies. Deterministic:
/// tree t draws everything from substream (seed, tree, t).
ForestModel train_forest(const LabeledDataset& train, const ForestHyperparams& hp,
                         std::uint64_t seed);

struct Prediction {
    std::size_t class_index = 0;
    std::string class_name;
    std::vector<double> probabilities; // mean of per-tree leaf frequencies
};

Prediction predict(const ForestModel& model, std::span<const double> features);

void save_forest(const ForestModel& model, std::ostream& out);
void save_forest(const ForestModel& model, const std::string& path);
ForestModel load_forest(std::istream& in);
ForestModel load_forest(const std::string& path);

} // namespace vibdiag

#endif
