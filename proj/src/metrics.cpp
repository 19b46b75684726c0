#include "vibdiag/metrics.hpp"

#include "vibdiag/detail/format.hpp"
#include "vibdiag/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace vibdiag {

double binary_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
    if (scores.size() != positive.size()) throw InvariantError("scores/labels length mismatch");
    const std::size_t n = scores.size();
    const std::size_t n_pos = static_cast<std::size_t>(
        std::count(positive.begin(), positive.end(), true));
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw DataError("AUC needs at least one positive and one negative sample");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks: every member of a tie group gets the group's average rank.
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j); // mean of ranks i+1..j
        for (std::size_t t = i; t < j; ++t)
            if (positive[order[t]]) pos_rank_sum += midrank;
        i = j;
    }
    const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
    return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

EvaluationReport evaluate(const ForestModel& model, const LabeledDataset& test) {
    test.validate();
    model.require_compatible(test.meta);

    EvaluationReport report;
    report.n_samples = test.size();

    // Row/column order: the model's classes, then any test-only labels.
    report.classes = model.classes;
    for (const std::string& label : test.class_names()) {
        if (!std::binary_search(model.classes.begin(), model.classes.end(), label)) {
            report.classes.push_back(label);
            report.warnings.push_back("class '" + label +
                                      "' is absent from the model; its AUC is undefined");
        }
    }
    auto class_index = [&](const std::string& label) {
        return static_cast<std::size_t>(
            std::find(report.classes.begin(), report.classes.end(), label) -
            report.classes.begin());
    };

    const std::size_t n_all = report.classes.size();
    report.confusion.assign(n_all, std::vector<std::size_t>(n_all, 0));
    std::vector<std::vector<double>> prob_rows(test.size());
    std::size_t correct = 0;
    for (std::size_t r = 0; r < test.size(); ++r) {
        const Prediction pred = predict(model, test.rows[r]);
        prob_rows[r] = pred.probabilities;
        const std::size_t t = class_index(test.labels[r]);
        ++report.confusion[t][pred.class_index];
        if (report.classes[pred.class_index] == test.labels[r]) ++correct;
    }
    report.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());

    report.per_class_auc.assign(n_all, std::numeric_limits<double>::quiet_NaN());
    double auc_sum = 0.0;
    std::size_t auc_count = 0;
    for (std::size_t c = 0; c < model.classes.size(); ++c) {
        std::vector<bool> positive(test.size());
        std::size_t n_pos = 0;
        for (std::size_t r = 0; r < test.size(); ++r) {
            positive[r] = test.labels[r] == model.classes[c];
            n_pos += positive[r];
        }
        if (n_pos == 0 || n_pos == test.size()) {
            report.warnings.push_back("class '" + model.classes[c] +
                                      "' lacks both positives and negatives in the test set; "
                                      "AUC excluded");
            continue;
        }
        std::vector<double> scores(test.size());
        for (std::size_t r = 0; r < test.size(); ++r) scores[r] = prob_rows[r][c];
        report.per_class_auc[c] = binary_auc(scores, positive);
        auc_sum += report.per_class_auc[c];
        ++auc_count;
    }
    if (auc_count == 0) {
        report.macro_auc = std::numeric_limits<double>::quiet_NaN();
        report.warnings.push_back("no class had a defined AUC");
    } else {
        report.macro_auc = auc_sum / static_cast<double>(auc_count);
    }
    return report;
}

std::string format_report(const EvaluationReport& report) {
    std::ostringstream os;
    os << "samples " << report.n_samples << "\n";
    os << "accuracy " << detail::format_real(report.accuracy) << "\n";
    os << "macro_auc " << detail::format_real(report.macro_auc) << "\n";
    for (std::size_t c = 0; c < report.classes.size(); ++c) {
        os << "auc " << report.classes[c] << ' ';
        if (std::isnan(report.per_class_auc[c]))
            os << "undefined";
        else
            os << detail::format_real(report.per_class_auc[c]);
        os << "\n";
    }
    os << "confusion rows=true cols=predicted order:";
    for (const std::string& c : report.classes) os << ' ' << c;
    os << "\n";
    for (std::size_t t = 0; t < report.confusion.size(); ++t) {
        os << "confusion " << report.classes[t];
        for (std::size_t p = 0; p < report.confusion[t].size(); ++p)
            os << (p == 0 ? " " : ",") << report.confusion[t][p];
        os << "\n";
    }
    for (const std::string& w : report.warnings) os << "# warning: " << w << "\n";
    return os.str();
}

} // namespace vibdiag
