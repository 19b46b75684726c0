#ifndef VIBDIAG_METRICS_HPP
#define VIBDIAG_METRICS_HPP

#include "vibdiag/dataset.hpp"
#include "vibdiag/forest.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace vibdiag {

struct EvaluationReport {
    std::size_t n_samples = 0;
    double accuracy = 0.0;
    double macro_auc = 0.0;              // mean of the defined per-class AUCs
    std::vector<std::string> classes;    // row/column order of everything below
    std::vector<double> per_class_auc;   // NaN where undefined (see warnings)
    std::vector<std::vector<std::size_t>> confusion; // [true class][predicted class]
    std::vector<std::string> warnings;
};

/// Rank-based binary ROC AUC; tied scores receive their midrank, so the
/// result equals P(score_pos > score_neg) + ½·P(tie).
double binary_auc(const std::vector<double>& scores, const std::vector<bool>& positive);

/// Accuracy, one-vs-rest macro AUC and confusion counts of `model` on
/// `test`. Test labels the model has never seen get confusion rows of their
/// own (they count as errors in accuracy) but no AUC; classes without both a
/// positive and a negative test sample are excluded from the macro mean with
/// a warning.
EvaluationReport evaluate(const ForestModel& model, const LabeledDataset& test);

/// Fixed-format text rendering (17-significant-digit reals) so identical
/// evaluations produce byte-identical report files.
std::string format_report(const EvaluationReport& report);

} // namespace vibdiag

#endif
