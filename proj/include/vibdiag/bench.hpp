#ifndef VIBDIAG_BENCH_HPP
#define VIBDIAG_BENCH_HPP

#include "vibdiag/forest.hpp"
#include "vibdiag/signal.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace vibdiag {

struct TimingStats {
    double median_s = 0.0; // the headline number: robust to scheduler outliers
    double mean_s = 0.0;
    double p95_s = 0.0; // nearest-rank
    std::size_t reps = 0;
    bool coarse_clock = false; // clock resolution exceeds 0.1% of the median
};

/// Times `pipeline` end-to-end on a monotonic clock: `warmup` untimed calls,
/// then `reps` timed ones. The callable must already hold its inputs — no
/// file I/O belongs inside it.
TimingStats measure_processing_time(const std::function<void()>& pipeline, std::size_t warmup,
                                    std::size_t reps);

/// Total reaction time of the deployed pipeline: the time to acquire one
/// window of samples plus the time to process it.
double system_delay(double window_samples, double sample_rate, double tp_median_s);

/// Smallest observable steady_clock increment, in seconds.
double clock_resolution_s();

/// Hardware/toolchain note attached to every delay report, since absolute
/// timings are only meaningful next to the machine that produced them.
std::string environment_descriptor();

/// Least-squares slope of log(y) against log(x); a crude scaling-exponent
/// probe for timing-vs-size data.
double loglog_slope(const std::vector<std::pair<double, double>>& xy);

struct DelayGrid {
    std::vector<std::size_t> windows; // requested N_o values
    std::vector<std::size_t> levels;  // k values
    std::vector<std::size_t> peaks;   // m values
};

struct DelayRow {
    std::size_t requested_window = 0;
    std::size_t window = 0; // after alignment to a multiple of 2^k
    double t_vin_s = 0.0;   // window / sample rate
    std::size_t k = 0;
    std::size_t m = 0;
    std::size_t s = 0; // feature count m·2^k
    double tp_median_s = 0.0;
    double tp_mean_s = 0.0;
    double tp_p95_s = 0.0;
    double tau_d_s = 0.0; // t_vin_s + tp_median_s
    bool coarse_clock = false;
};

struct AveragedPoint {
    double key = 0.0; // T_vin (s) or S, depending on the view
    double mean_tau_d_s = 0.0;
};

struct DelayReport {
    std::string environment;
    std::vector<DelayRow> rows;
    std::vector<AveragedPoint> by_t_vin; // τ_d vs T_vin, averaged over the S axis
    std::vector<AveragedPoint> by_s;     // τ_d vs S, averaged over the T_vin axis
    std::vector<std::string> notes;      // alignment adjustments, skipped cells
};

struct DelaySweepOptions {
    std::size_t warmup = 3;
    std::size_t reps = 15;
    // A window not divisible by 2^k is rounded to the nearest multiple
    // (ties up) when true; the cell is skipped with a note when false.
    bool align_windows = true;
    std::string wavelet = "db4";
    ForestHyperparams hyperparams{50, 12, 1, 0};
};

/// Runs the full (N_o × k × m) grid over the given labeled recordings: per
/// cell, segments the recordings, extracts features, trains a forest, then
/// times extract+predict. Strictly sequential — parallel cells would
/// contaminate each other's timings.
DelayReport delay_sweep(const DelayGrid& grid, const std::vector<SignalSegment>& recordings,
                        const DelaySweepOptions& options, std::uint64_t seed);

/// CSV with `# env:`/`# note:` comment headers and one row per grid cell.
void write_delay_report_csv(const DelayReport& report, std::ostream& out);
/// The two averaged views, tagged by axis, in one CSV.
void write_averaged_views_csv(const DelayReport& report, std::ostream& out);

} // namespace vibdiag

#endif
