#include "vibdiag/features.hpp"

#include "vibdiag/errors.hpp"
#include "vibdiag/spectrum.hpp"
#include "vibdiag/wavelet.hpp"

#include <algorithm>
#include <cmath>

namespace vibdiag {

FeatureVector extract_features(const SignalSegment& segment, std::size_t k, std::size_t m,
                               const std::string& wavelet) {
    if (m == 0) throw DataError("peak count m must be at least 1");

    PacketTree tree = wpt_decompose(segment, static_cast<int>(k), wavelet);
    std::vector<std::vector<double>> leaves = reconstruct_leaves(tree);

    FeatureVector fv;
    fv.k = k;
    fv.m = m;
    fv.wavelet = tree.wavelet;
    fv.values.reserve(m * leaves.size());
    for (const auto& leaf : leaves) {
        AmplitudeSpectrum spec = amplitude_spectrum(leaf, segment.sample_rate);
        for (const SpectralPeak& peak : top_m_peaks(spec, m))
            fv.values.push_back(peak.amplitude * peak.frequency);
    }
    return fv;
}

namespace {

BaselineFeatures spectrum_statistics(const AmplitudeSpectrum& spec) {
    const std::vector<double>& a = spec.amps;
    const double n = static_cast<double>(a.size());

    double sum = 0.0, sum_sq = 0.0, peak = 0.0;
    for (double v : a) {
        sum += v;
        sum_sq += v * v;
        peak = std::max(peak, v);
    }
    if (sum == 0.0)
        throw DataError("all-zero spectrum: crest factor and entropy are undefined");

    BaselineFeatures out;
    out.mean = sum / n;
    out.crest_factor = peak / std::sqrt(sum_sq / n);

    double var = 0.0, fourth = 0.0;
    for (double v : a) {
        const double d = v - out.mean;
        var += d * d;
        fourth += d * d * d * d;
    }
    var /= n;
    fourth /= n;
    out.kurtosis = var > 0.0 ? fourth / (var * var) : 0.0;

    double entropy = 0.0;
    for (double v : a) {
        const double p = v / sum;
        if (p > 0.0) entropy -= p * std::log2(p);
    }
    out.shannon_entropy = entropy;
    return out;
}

} // namespace

BaselineFeatures baseline_features(const SignalSegment& segment) {
    if (segment.samples.size() < 4)
        throw DataError("baseline features need a segment of at least 4 samples");
    return spectrum_statistics(amplitude_spectrum(segment.samples, segment.sample_rate));
}

std::vector<BaselineFeatures> baseline_features_per_leaf(const SignalSegment& segment,
                                                         std::size_t k,
                                                         const std::string& wavelet) {
    if (segment.samples.size() < 4)
        throw DataError("baseline features need a segment of at least 4 samples");
    PacketTree tree = wpt_decompose(segment, static_cast<int>(k), wavelet);
    std::vector<BaselineFeatures> out;
    out.reserve(tree.leaf_count());
    for (const auto& leaf : reconstruct_leaves(tree))
        out.push_back(spectrum_statistics(amplitude_spectrum(leaf, segment.sample_rate)));
    return out;
}

} // namespace vibdiag
