#ifndef VIBDIAG_SIGNAL_HPP
#define VIBDIAG_SIGNAL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vibdiag {

/// Fixed-length window of vibration samples. `label` is empty when the
/// segment carries no class information.
struct SignalSegment {
    std::vector<double> samples;
    double sample_rate = 0.0; // samples per second
    std::string label;
};

struct SpeedRamp {
    double start_rate = 0.0; // impulses/second at t = 0
    double end_rate = 0.0;   // impulses/second at t = duration
};

/// Parameters for the synthetic bearing-signal generator: Gaussian noise
/// plus an impulse train, each impulse exciting a damped resonance.
struct FaultSynthesisSpec {
    double sample_rate = 12000.0;   // samples/second
    double duration = 1.0;          // seconds
    double fault_rate = 0.0;        // impulses/second, 0 = healthy
    double resonance_freq = 3000.0; // Hz, must be below sample_rate / 2
    double damping = 800.0;         // 1/second decay constant
    double impulse_amplitude = 1.0;
    double noise_sigma = 0.0;
    std::optional<SpeedRamp> speed_ramp; // overrides fault_rate when set
    std::uint64_t rng_seed = 0;
};

/// Cut `signal` into fixed windows of `window` samples advancing by `hop`.
/// Trailing samples that do not fill a whole window are discarded.
std::vector<SignalSegment> segment_signal(std::span<const double> signal,
                                          double sample_rate,
                                          std::size_t window,
                                          std::size_t hop);

/// Same, preserving the source segment's label.
std::vector<SignalSegment> segment_signal(const SignalSegment& signal,
                                          std::size_t window,
                                          std::size_t hop);

/// Acquisition time of a window: n_points / sample_rate seconds.
double segment_duration(std::size_t n_points, double sample_rate);

/// Deterministic synthetic vibration signal of duration * sample_rate
/// samples. Identical specs produce bit-identical output.
SignalSegment synthesize_bearing_signal(const FaultSynthesisSpec& spec);

} // namespace vibdiag

#endif
