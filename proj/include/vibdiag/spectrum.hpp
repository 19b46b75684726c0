#ifndef VIBDIAG_SPECTRUM_HPP
#define VIBDIAG_SPECTRUM_HPP

#include <span>
#include <vector>

namespace vibdiag {

/// One-sided amplitude spectrum, bins 0..floor(N/2). Normalized so a unit
/// sinusoid on a bin reads amplitude 1: amps[j] = 2|X_j|/N for interior
/// bins, |X_j|/N at DC and (for even N) Nyquist. No window, no padding.
struct AmplitudeSpectrum {
    std::vector<double> freqs; // Hz, freqs[j] = j * sample_rate / N
    std::vector<double> amps;
    std::size_t source_length = 0;
    double sample_rate = 0.0;
};

struct SpectralPeak {
    double amplitude = 0.0;
    double frequency = 0.0; // Hz, always > 0 (DC is never selected)
};

AmplitudeSpectrum amplitude_spectrum(std::span<const double> waveform, double sample_rate);

/// The m largest non-DC bins, in non-increasing amplitude order; equal
/// amplitudes rank by lower frequency.
std::vector<SpectralPeak> top_m_peaks(const AmplitudeSpectrum& spectrum, std::size_t m);

} // namespace vibdiag

#endif
