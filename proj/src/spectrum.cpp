#include "vibdiag/spectrum.hpp"

#include "vibdiag/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <limits>
#include <mutex>
#include <numeric>
#include <unordered_map>

namespace vibdiag {

namespace {

// FFTW planning is not thread-safe and plans are expensive relative to the
// short segments we transform, so keep one plan per length behind a mutex.
// Plans are created FFTW_UNALIGNED so they can be executed on any buffer via
// the new-array interface; execution itself needs no lock.
class PlanCache {
public:
    fftw_plan plan_for(std::size_t n) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;

        std::vector<double> in(n);
        std::vector<std::complex<double>> out(n / 2 + 1);
        fftw_plan plan = fftw_plan_dft_r2c_1d(
            static_cast<int>(n), in.data(), reinterpret_cast<fftw_complex*>(out.data()),
            FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan == nullptr) throw InvariantError("FFT plan creation failed");
        plans_.emplace(n, plan);
        return plan;
    }

    ~PlanCache() {
        for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    std::mutex mutex_;
    std::unordered_map<std::size_t, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

} // namespace

AmplitudeSpectrum amplitude_spectrum(std::span<const double> waveform, double sample_rate) {
    const std::size_t n = waveform.size();
    if (n < 2) throw DataError("amplitude spectrum needs at least 2 samples");
    if (!(sample_rate > 0.0)) throw DataError("sample rate must be positive");
    if (n > static_cast<std::size_t>(std::numeric_limits<int>::max()))
        throw DataError("waveform too long for FFT backend");

    std::vector<double> in(waveform.begin(), waveform.end());
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_execute_dft_r2c(plan_cache().plan_for(n), in.data(),
                         reinterpret_cast<fftw_complex*>(out.data()));

    AmplitudeSpectrum spec;
    spec.source_length = n;
    spec.sample_rate = sample_rate;
    const std::size_t bins = n / 2 + 1;
    spec.freqs.resize(bins);
    spec.amps.resize(bins);
    const double df = sample_rate / static_cast<double>(n);
    for (std::size_t j = 0; j < bins; ++j) {
        spec.freqs[j] = df * static_cast<double>(j);
        const bool edge = (j == 0) || (n % 2 == 0 && j == n / 2);
        const double scale = (edge ? 1.0 : 2.0) / static_cast<double>(n);
        spec.amps[j] = scale * std::abs(out[j]);
    }
    return spec;
}

std::vector<SpectralPeak> top_m_peaks(const AmplitudeSpectrum& spectrum, std::size_t m) {
    if (spectrum.amps.size() != spectrum.freqs.size())
        throw InvariantError("spectrum arrays disagree in length");
    if (spectrum.amps.empty()) throw DataError("empty spectrum");

    const std::size_t candidates = spectrum.amps.size() - 1; // all bins except DC
    if (m > candidates)
        throw DataError("requested " + std::to_string(m) + " peaks but spectrum has only " +
                        std::to_string(candidates) + " non-DC bins");

    std::vector<std::size_t> order(candidates);
    std::iota(order.begin(), order.end(), std::size_t{1});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (spectrum.amps[a] != spectrum.amps[b])
                              return spectrum.amps[a] > spectrum.amps[b];
                          return spectrum.freqs[a] < spectrum.freqs[b];
                      });

    std::vector<SpectralPeak> peaks;
    peaks.reserve(m);
    for (std::size_t i = 0; i < m; ++i)
        peaks.push_back({spectrum.amps[order[i]], spectrum.freqs[order[i]]});
    return peaks;
}

} // namespace vibdiag
