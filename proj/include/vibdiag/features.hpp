#ifndef VIBDIAG_FEATURES_HPP
#define VIBDIAG_FEATURES_HPP

#include "vibdiag/signal.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace vibdiag {

/// Output of the WPT-FFT extractor. Layout is leaf-major: all m peak
/// features of leaf 0 (natural order), then leaf 1, ... so
/// values[j*m + r] is peak rank r of leaf j and the total length is m·2^k.
struct FeatureVector {
    std::vector<double> values;
    std::size_t k = 0;
    std::size_t m = 0;
    std::string wavelet;
};

/// Decomposes the segment to level k, rebuilds each leaf's elementary
/// waveform, and emits amplitude × frequency(Hz) for the m strongest
/// non-DC spectral peaks of every leaf.
FeatureVector extract_features(const SignalSegment& segment, std::size_t k, std::size_t m,
                               const std::string& wavelet);

/// Classical spectral statistics used as a comparison baseline, computed
/// over the one-sided amplitude spectrum of the raw segment.
struct BaselineFeatures {
    double mean = 0.0;
    double crest_factor = 0.0;    // max / RMS of the amplitude bins
    double kurtosis = 0.0;        // fourth standardized moment (not excess); 0 when variance is 0
    double shannon_entropy = 0.0; // bits, over amps normalized to a distribution
};

BaselineFeatures baseline_features(const SignalSegment& segment);

/// Variant that computes the same four statistics per leaf waveform after a
/// level-k decomposition (leaf-natural order). Kept alongside the raw-segment
/// version because either reading of "spectrum amplitude features" is
/// defensible; neither carries asserted reference numbers.
std::vector<BaselineFeatures> baseline_features_per_leaf(const SignalSegment& segment,
                                                         std::size_t k,
                                                         const std::string& wavelet);

} // namespace vibdiag

#endif
