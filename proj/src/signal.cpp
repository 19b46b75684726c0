#include "vibdiag/signal.hpp"

#include <cmath>
#include <random>

#include "vibdiag/detail/rng.hpp"
#include "vibdiag/errors.hpp"

namespace vibdiag {

std::vector<SignalSegment> segment_signal(std::span<const double> signal,
                                          double sample_rate,
                                          std::size_t window,
                                          std::size_t hop) {
    if (window < 1 || hop < 1) {
        throw InvariantError("segment_signal: window and hop must be >= 1");
    }
    if (sample_rate <= 0.0) {
        throw InvariantError("segment_signal: sample_rate must be positive");
    }
    if (signal.size() < window) {
        throw DataError("input shorter than one window");
    }
    const std::size_t count = (signal.size() - window) / hop + 1;
    std::vector<SignalSegment> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t off = i * hop;
        SignalSegment seg;
        seg.samples.assign(signal.begin() + static_cast<std::ptrdiff_t>(off),
                           signal.begin() + static_cast<std::ptrdiff_t>(off + window));
        seg.sample_rate = sample_rate;
        out.push_back(std::move(seg));
    }
    return out;
}

std::vector<SignalSegment> segment_signal(const SignalSegment& signal,
                                          std::size_t window,
                                          std::size_t hop) {
    auto segments = segment_signal(std::span<const double>(signal.samples),
                                   signal.sample_rate, window, hop);
    for (auto& seg : segments) {
        seg.label = signal.label;
    }
    return segments;
}

double segment_duration(std::size_t n_points, double sample_rate) {
    if (n_points < 1) {
        throw InvariantError("segment_duration: n_points must be >= 1");
    }
    if (sample_rate <= 0.0) {
        throw InvariantError("segment_duration: sample_rate must be positive");
    }
    return static_cast<double>(n_points) / sample_rate;
}

namespace {

void check_spec(const FaultSynthesisSpec& spec) {
    if (spec.sample_rate <= 0.0) {
        throw DataError("synthesize_bearing_signal: sample_rate must be positive");
    }
    if (spec.duration <= 0.0) {
        throw DataError("synthesize_bearing_signal: duration must be positive");
    }
    if (spec.resonance_freq >= spec.sample_rate / 2.0) {
        throw DataError("synthesize_bearing_signal: resonance_freq must be below sample_rate / 2");
    }
    if (spec.fault_rate < 0.0 || spec.noise_sigma < 0.0 || spec.damping < 0.0) {
        throw DataError("synthesize_bearing_signal: fault_rate, noise_sigma and damping must be >= 0");
    }
    if (spec.speed_ramp &&
        (spec.speed_ramp->start_rate < 0.0 || spec.speed_ramp->end_rate < 0.0)) {
        throw DataError("synthesize_bearing_signal: speed_ramp rates must be >= 0");
    }
}

// Integrated impulse count up to time t for a linearly swept rate.
double impulse_phase(const FaultSynthesisSpec& spec, double t) {
    if (spec.speed_ramp) {
        const double r0 = spec.speed_ramp->start_rate;
        const double r1 = spec.speed_ramp->end_rate;
        return r0 * t + (r1 - r0) * t * t / (2.0 * spec.duration);
    }
    return spec.fault_rate * t;
}

} // namespace

SignalSegment synthesize_bearing_signal(const FaultSynthesisSpec& spec) {
    check_spec(spec);
    const auto n = static_cast<std::size_t>(std::llround(spec.duration * spec.sample_rate));
    if (n < 1) {
        throw DataError("synthesize_bearing_signal: duration * sample_rate must be >= 1 sample");
    }

    SignalSegment out;
    out.sample_rate = spec.sample_rate;
    out.samples.assign(n, 0.0);

    if (spec.noise_sigma > 0.0) {
        std::mt19937_64 rng(spec.rng_seed);
        for (auto& s : out.samples) {
            s = spec.noise_sigma * detail::next_gaussian(rng);
        }
    }

    const bool has_train = spec.speed_ramp
                               ? (spec.speed_ramp->start_rate > 0.0 || spec.speed_ramp->end_rate > 0.0)
                               : (spec.fault_rate > 0.0);
    if (!has_train) {
        return out;
    }

    // Ring-down horizon: past exp(-damping t) < 1e-8 the tail is inaudible
    // against double precision sums.
    const double dt = 1.0 / spec.sample_rate;
    std::size_t horizon = n;
    if (spec.damping > 0.0) {
        horizon = static_cast<std::size_t>(std::ceil(18.42 / spec.damping * spec.sample_rate)) + 1;
    }

    const double omega = 2.0 * 3.14159265358979323846 * spec.resonance_freq;
    double prev_phase = impulse_phase(spec, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double phase = impulse_phase(spec, static_cast<double>(i + 1) * dt);
        if (std::floor(phase) > std::floor(prev_phase)) {
            // Impulse onset aligned to the sample grid.
            const std::size_t onset = i;
            const std::size_t stop = std::min(n, onset + horizon);
            for (std::size_t j = onset; j < stop; ++j) {
                const double tau = static_cast<double>(j - onset) * dt;
                out.samples[j] += spec.impulse_amplitude * std::exp(-spec.damping * tau) *
                                  std::sin(omega * tau);
            }
        }
        prev_phase = phase;
    }
    return out;
}

} // namespace vibdiag
