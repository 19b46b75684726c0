#ifndef VIBDIAG_SELECTION_HPP
#define VIBDIAG_SELECTION_HPP

#include "vibdiag/signal.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace vibdiag {

double coefficient_energy(std::span<const double> coeffs);

/// Shannon entropy (bits) of the energy distribution p_i = c_i² / Σc².
/// All-zero input is an error: the distribution does not exist.
double coefficient_entropy(std::span<const double> coeffs);

struct RatioScore {
    double energy = 0.0;
    double entropy = 0.0;
    double ratio = 0.0;       // energy / entropy; +inf when concentrated
    bool concentrated = false; // all energy in one coefficient → zero entropy
};

/// Energy-to-entropy ratio. Perfectly concentrated energy (entropy 0) is the
/// best possible case, reported as a +infinity sentinel rather than an error.
RatioScore energy_entropy_ratio(std::span<const double> coeffs);

struct SelectionScore {
    std::string wavelet;
    std::size_t level = 0;
    double energy = 0.0;
    double entropy = 0.0;
    double ratio = 0.0;
    bool concentrated = false;
};

struct SelectionResult {
    std::string best_wavelet;
    std::size_t best_level = 0;
    std::vector<SelectionScore> table; // candidate-major, level ascending
};

/// Scores every (candidate wavelet, level 1..k_max) pair by the
/// energy-to-entropy ratio of the pooled coefficients of all nodes at that
/// level, and returns the argmax. Because the transform is orthonormal the
/// energy term is the same at every level (Parseval), so the ranking is
/// effectively driven by how concentrated the coefficient distribution is.
/// Ties break toward the smaller level, then earlier candidate.
SelectionResult select_wavelet_and_level(const SignalSegment& segment,
                                         const std::vector<std::string>& candidate_wavelets,
                                         std::size_t k_max);

/// Aggregated variant: scores each segment independently and averages the
/// ratios per (wavelet, level) before taking the argmax. Any segment with a
/// concentrated (infinite) score makes the pooled score infinite. The
/// reported energy/entropy columns are plain means. Single-segment scoring
/// is the default path; use this when a recording yields many segments.
SelectionResult select_wavelet_and_level(const std::vector<SignalSegment>& segments,
                                         const std::vector<std::string>& candidate_wavelets,
                                         std::size_t k_max);

} // namespace vibdiag

#endif
