#ifndef VIBDIAG_IO_HPP
#define VIBDIAG_IO_HPP

#include "vibdiag/dataset.hpp"
#include "vibdiag/signal.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace vibdiag {

/// Reads one raw-signal CSV: header `sample` (one real per row) or
/// `sample,label` (constant label column). Reals are rejected with their
/// line number when malformed; blank lines are malformed. Sampling rate is
/// never stored in signal files — it always arrives out-of-band.
SignalSegment read_signal_csv(std::istream& in, const std::string& name, double sample_rate);
SignalSegment read_signal_csv(const std::string& path, double sample_rate);

/// Writes the `sample` single-column form, 17-significant-digit reals, so a
/// read-back is bit-identical.
void write_signal_csv(const SignalSegment& segment, std::ostream& out);
void write_signal_csv(const SignalSegment& segment, const std::string& path);

/// Loads one CSV file or every *.csv in a directory (sorted by filename, so
/// the collection order never depends on directory enumeration). Labels are
/// resolved in this order: explicit `sample,label` column; else the filename
/// key (stem minus a trailing _<digits> chunk) looked up in label_map when
/// the map is nonempty (missing key → error); else the filename key itself.
std::vector<SignalSegment> load_signals(const std::string& path, double sample_rate,
                                        const std::map<std::string, std::string>& label_map = {});

/// Feature CSV: `# k=` / `# m=` / `# wavelet=` / `# fs=` / `# window=`
/// comment lines, then header `f_0,...,f_{S-1},label`, one row per segment.
void save_features(const LabeledDataset& dataset, std::ostream& out);
void save_features(const LabeledDataset& dataset, const std::string& path);
LabeledDataset load_features(std::istream& in, const std::string& name);
LabeledDataset load_features(const std::string& path);

/// A synthesis plan file is flat key=value text: keys before the first
/// `class=<label>` line set defaults (fs, duration, count, seed, and any
/// fault parameters); each class block inherits the defaults and overrides
/// freely (fault_rate, resonance, damping, amplitude, noise, ramp_to,
/// duration, count).
struct SynthPlan {
    double sample_rate = 12000.0;
    std::uint64_t seed = 0;
    struct ClassPlan {
        std::string label;
        FaultSynthesisSpec spec; // rng_seed filled per recording at run time
        std::size_t count = 1;   // recordings to generate
    };
    std::vector<ClassPlan> classes;
};

SynthPlan parse_synth_plan(std::istream& in, const std::string& name);
SynthPlan parse_synth_plan(const std::string& path);

/// Generates every recording in the plan, labels set, with one seed
/// substream per (class, recording) so any subset regenerates identically.
std::vector<SignalSegment> run_synth_plan(const SynthPlan& plan);

} // namespace vibdiag

#endif
