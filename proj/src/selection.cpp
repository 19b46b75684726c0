#include "vibdiag/selection.hpp"

#include "vibdiag/errors.hpp"
#include "vibdiag/wavelet.hpp"

#include <cmath>
#include <limits>

namespace vibdiag {

double coefficient_energy(std::span<const double> coeffs) {
    if (coeffs.empty()) throw DataError("coefficient energy of an empty sequence");
    double energy = 0.0;
    for (double c : coeffs) energy += c * c;
    return energy;
}

double coefficient_entropy(std::span<const double> coeffs) {
    const double energy = coefficient_energy(coeffs);
    if (energy == 0.0) throw DataError("entropy undefined for zero energy");
    double entropy = 0.0;
    for (double c : coeffs) {
        const double p = c * c / energy;
        if (p > 0.0) entropy -= p * std::log2(p);
    }
    // Rounding can leave a tiny negative residue when one p is nearly 1.
    return entropy < 0.0 ? 0.0 : entropy;
}

RatioScore energy_entropy_ratio(std::span<const double> coeffs) {
    RatioScore score;
    score.energy = coefficient_energy(coeffs);
    if (score.energy == 0.0) throw DataError("entropy undefined for zero energy");
    score.entropy = coefficient_entropy(coeffs);
    if (score.entropy == 0.0) {
        score.concentrated = true;
        score.ratio = std::numeric_limits<double>::infinity();
    } else {
        score.ratio = score.energy / score.entropy;
    }
    return score;
}

namespace {

std::vector<SelectionScore> score_segment(const SignalSegment& segment,
                                          const std::vector<std::string>& candidates,
                                          std::size_t k_max) {
    if (k_max < 1) throw DataError("maximum decomposition level must be at least 1");
    if (candidates.empty()) throw DataError("no candidate wavelets given");

    std::vector<SelectionScore> table;
    table.reserve(candidates.size() * k_max);
    for (const std::string& name : candidates) {
        PacketTree tree = wpt_decompose(segment, static_cast<int>(k_max), name);
        for (std::size_t level = 1; level <= k_max; ++level) {
            std::vector<double> pooled;
            pooled.reserve(segment.samples.size());
            for (const auto& node : tree.nodes[level])
                pooled.insert(pooled.end(), node.begin(), node.end());
            const RatioScore r = energy_entropy_ratio(pooled);
            table.push_back({name, level, r.energy, r.entropy, r.ratio, r.concentrated});
        }
    }
    return table;
}

SelectionResult pick_best(std::vector<SelectionScore> table) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < table.size(); ++i) {
        const SelectionScore& cur = table[i];
        const SelectionScore& top = table[best];
        if (cur.ratio > top.ratio || (cur.ratio == top.ratio && cur.level < top.level)) best = i;
    }
    SelectionResult result;
    result.best_wavelet = table[best].wavelet;
    result.best_level = table[best].level;
    result.table = std::move(table);
    return result;
}

} // namespace

SelectionResult select_wavelet_and_level(const SignalSegment& segment,
                                         const std::vector<std::string>& candidate_wavelets,
                                         std::size_t k_max) {
    return pick_best(score_segment(segment, candidate_wavelets, k_max));
}

SelectionResult select_wavelet_and_level(const std::vector<SignalSegment>& segments,
                                         const std::vector<std::string>& candidate_wavelets,
                                         std::size_t k_max) {
    if (segments.empty()) throw DataError("no segments to score");
    std::vector<SelectionScore> mean = score_segment(segments[0], candidate_wavelets, k_max);
    for (std::size_t s = 1; s < segments.size(); ++s) {
        std::vector<SelectionScore> one = score_segment(segments[s], candidate_wavelets, k_max);
        for (std::size_t i = 0; i < mean.size(); ++i) {
            mean[i].energy += one[i].energy;
            mean[i].entropy += one[i].entropy;
            mean[i].ratio += one[i].ratio; // inf propagates, as intended
            mean[i].concentrated = mean[i].concentrated || one[i].concentrated;
        }
    }
    const double n = static_cast<double>(segments.size());
    for (SelectionScore& s : mean) {
        s.energy /= n;
        s.entropy /= n;
        s.ratio /= n;
    }
    return pick_best(std::move(mean));
}

} // namespace vibdiag
