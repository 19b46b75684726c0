#include "vibdiag/bench.hpp"

#include "vibdiag/detail/format.hpp"
#include "vibdiag/detail/rng.hpp"
#include "vibdiag/errors.hpp"
#include "vibdiag/features.hpp"
#include "vibdiag/wavelet.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace vibdiag {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

// Defeats dead-code elimination of the timed pipeline's result.
volatile double g_timing_sink = 0.0;

} // namespace

double clock_resolution_s() {
    double best = 1.0;
    for (int probe = 0; probe < 16; ++probe) {
        const Clock::time_point start = Clock::now();
        Clock::time_point next = Clock::now();
        while (next == start) next = Clock::now();
        best = std::min(best, seconds_between(start, next));
    }
    return best;
}

TimingStats measure_processing_time(const std::function<void()>& pipeline, std::size_t warmup,
                                    std::size_t reps) {
    if (reps < 5) throw DataError("timing needs at least 5 repetitions");
    for (std::size_t i = 0; i < warmup; ++i) pipeline();

    std::vector<double> samples(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        const Clock::time_point start = Clock::now();
        pipeline();
        samples[i] = seconds_between(start, Clock::now());
    }

    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    TimingStats stats;
    stats.reps = reps;
    stats.median_s = reps % 2 == 1 ? sorted[reps / 2]
                                   : 0.5 * (sorted[reps / 2 - 1] + sorted[reps / 2]);
    stats.mean_s = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(reps);
    const std::size_t p95_rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(reps)));
    stats.p95_s = sorted[p95_rank - 1];
    stats.coarse_clock = stats.median_s <= 0.0 || clock_resolution_s() > 1e-3 * stats.median_s;
    return stats;
}

double system_delay(double window_samples, double sample_rate, double tp_median_s) {
    if (!(window_samples > 0.0)) throw DataError("window sample count must be positive");
    if (!(sample_rate > 0.0)) throw DataError("sample rate must be positive");
    if (!(tp_median_s >= 0.0)) throw DataError("processing time cannot be negative");
    return window_samples / sample_rate + tp_median_s;
}

std::string environment_descriptor() {
    std::ostringstream os;
#ifdef __VERSION__
    os << "cc " << __VERSION__;
#else
    os << "cc unknown";
#endif
    os << "; single-threaded; steady_clock resolution "
       << detail::format_real(clock_resolution_s() * 1e9) << " ns";
    std::ifstream cpuinfo("/proc/cpuinfo");
    std::string line;
    while (std::getline(cpuinfo, line)) {
        const std::size_t colon = line.find(':');
        if (line.rfind("model name", 0) == 0 && colon != std::string::npos) {
            os << "; cpu" << line.substr(colon + 1);
            break;
        }
    }
    return os.str();
}

double loglog_slope(const std::vector<std::pair<double, double>>& xy) {
    if (xy.size() < 2) throw DataError("slope needs at least 2 points");
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : xy) {
        if (!(x > 0.0) || !(y > 0.0)) throw DataError("log-log slope needs positive data");
        mx += std::log(x);
        my += std::log(y);
    }
    mx /= static_cast<double>(xy.size());
    my /= static_cast<double>(xy.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [x, y] : xy) {
        const double dx = std::log(x) - mx;
        sxy += dx * (std::log(y) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) throw DataError("log-log slope needs at least two distinct x values");
    return sxy / sxx;
}

DelayReport delay_sweep(const DelayGrid& grid, const std::vector<SignalSegment>& recordings,
                        const DelaySweepOptions& options, std::uint64_t seed) {
    if (grid.windows.empty() || grid.levels.empty() || grid.peaks.empty())
        throw DataError("delay grid has an empty axis");
    if (recordings.empty()) throw DataError("delay sweep needs at least one recording");
    const double fs = recordings[0].sample_rate;
    for (const SignalSegment& r : recordings)
        if (r.sample_rate != fs)
            throw DataError("recordings disagree on sample rate; a sweep needs one rate");
    const std::string wavelet = wavelet_filters(options.wavelet).name; // canonical name

    DelayReport report;
    report.environment = environment_descriptor();

    std::uint64_t cell_index = 0;
    for (std::size_t requested : grid.windows) {
        for (std::size_t k : grid.levels) {
            for (std::size_t m : grid.peaks) {
                const std::uint64_t cell_seed = detail::mix_seed(seed, cell_index++);
                const std::size_t stride = std::size_t{1} << k;
                std::size_t window = requested;
                if (requested % stride != 0) {
                    std::ostringstream cell;
                    cell << "(N_o=" << requested << ", k=" << k << ", m=" << m << ")";
                    if (!options.align_windows) {
                        report.notes.push_back("skipped " + cell.str() + ": window not divisible by " +
                                               std::to_string(stride));
                        continue;
                    }
                    window = stride * static_cast<std::size_t>(std::max<long long>(
                                          1, std::llround(static_cast<double>(requested) /
                                                          static_cast<double>(stride))));
                    report.notes.push_back("aligned " + cell.str() + ": window rounded to " +
                                           std::to_string(window));
                }

                LabeledDataset dataset;
                dataset.meta = {k, m, wavelet, fs, window};
                SignalSegment probe;
                try {
                    for (const SignalSegment& recording : recordings) {
                        for (SignalSegment& seg :
                             segment_signal(recording.samples, fs, window, window)) {
                            seg.label = recording.label;
                            if (probe.samples.empty()) probe = seg;
                            FeatureVector fv = extract_features(seg, k, m, wavelet);
                            dataset.rows.push_back(std::move(fv.values));
                            dataset.labels.push_back(seg.label);
                        }
                    }
                    const ForestModel model =
                        train_forest(dataset, options.hyperparams, cell_seed);

                    const TimingStats stats = measure_processing_time(
                        [&] {
                            const FeatureVector fv =
                                extract_features(probe, k, m, wavelet);
                            const Prediction pred = predict(model, fv.values);
                            g_timing_sink = g_timing_sink + pred.probabilities[0];
                        },
                        options.warmup, options.reps);

                    DelayRow row;
                    row.requested_window = requested;
                    row.window = window;
                    row.t_vin_s = static_cast<double>(window) / fs;
                    row.k = k;
                    row.m = m;
                    row.s = m << k;
                    row.tp_median_s = stats.median_s;
                    row.tp_mean_s = stats.mean_s;
                    row.tp_p95_s = stats.p95_s;
                    row.tau_d_s = system_delay(static_cast<double>(window), fs, stats.median_s);
                    row.coarse_clock = stats.coarse_clock;
                    report.rows.push_back(row);
                } catch (const DataError& e) {
                    std::ostringstream cell;
                    cell << "(N_o=" << requested << ", k=" << k << ", m=" << m << ")";
                    report.notes.push_back("skipped " + cell.str() + ": " + e.what());
                }
            }
        }
    }
    if (report.rows.empty()) throw DataError("every sweep cell was skipped; nothing to report");

    // Fig-style averaged views: one groups cells by acquisition time, the
    // other by feature-vector size, each averaging τ_d over the other axis.
    std::map<std::size_t, std::pair<double, std::size_t>> by_window, by_s;
    for (const DelayRow& row : report.rows) {
        auto& [wt, wc] = by_window[row.requested_window];
        wt += row.tau_d_s;
        ++wc;
        auto& [st, sc] = by_s[row.s];
        st += row.tau_d_s;
        ++sc;
    }
    for (const auto& [window, acc] : by_window)
        report.by_t_vin.push_back(
            {static_cast<double>(window) / fs, acc.first / static_cast<double>(acc.second)});
    for (const auto& [s, acc] : by_s)
        report.by_s.push_back(
            {static_cast<double>(s), acc.first / static_cast<double>(acc.second)});
    return report;
}

void write_delay_report_csv(const DelayReport& report, std::ostream& out) {
    out << "# env: " << report.environment << "\n";
    for (const std::string& note : report.notes) out << "# note: " << note << "\n";
    bool any_coarse = false;
    for (const DelayRow& row : report.rows) any_coarse = any_coarse || row.coarse_clock;
    if (any_coarse)
        out << "# note: clock resolution is coarse relative to some medians; "
               "treat those timings as upper bounds\n";
    out << "N_o,T_vin_s,k,m,S,Tp_median_s,Tp_mean_s,Tp_p95_s,tau_d_s\n";
    for (const DelayRow& row : report.rows) {
        out << row.window << ',' << detail::format_real(row.t_vin_s) << ',' << row.k << ','
            << row.m << ',' << row.s << ',' << detail::format_real(row.tp_median_s) << ','
            << detail::format_real(row.tp_mean_s) << ',' << detail::format_real(row.tp_p95_s)
            << ',' << detail::format_real(row.tau_d_s) << "\n";
    }
}

void write_averaged_views_csv(const DelayReport& report, std::ostream& out) {
    out << "view,key,mean_tau_d_s\n";
    for (const AveragedPoint& p : report.by_t_vin)
        out << "t_vin," << detail::format_real(p.key) << ','
            << detail::format_real(p.mean_tau_d_s) << "\n";
    for (const AveragedPoint& p : report.by_s)
        out << "S," << detail::format_real(p.key) << ',' << detail::format_real(p.mean_tau_d_s)
            << "\n";
}

} // namespace vibdiag
