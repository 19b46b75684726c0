#include "vibdiag/io.hpp"

#include "vibdiag/detail/format.hpp"
#include "vibdiag/detail/rng.hpp"
#include "vibdiag/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace vibdiag {

namespace {

[[noreturn]] void bad_file(const std::string& name, std::size_t line_no, const std::string& what) {
    throw DataError(name + ":" + std::to_string(line_no) + ": " + what);
}

double parse_real_cell(const std::string& name, std::size_t line_no, const std::string& cell) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end == cell.c_str() || *end != '\0')
        bad_file(name, line_no, "not a number: '" + cell + "'");
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        cells.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return cells;
}

// getline that tolerates CRLF input.
bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

void require_plain_label(const std::string& label) {
    if (label.empty() || label.find_first_of(", \t") != std::string::npos)
        throw DataError("label '" + label + "' cannot be serialized (blank or contains "
                        "whitespace/comma)");
}

} // namespace

SignalSegment read_signal_csv(std::istream& in, const std::string& name, double sample_rate) {
    if (!(sample_rate > 0.0)) throw DataError("sample rate must be positive");

    SignalSegment segment;
    segment.sample_rate = sample_rate;

    std::string line;
    std::size_t line_no = 0;
    bool labeled = false, saw_header = false;
    while (next_line(in, line)) {
        ++line_no;
        if (!line.empty() && line[0] == '#') continue;
        if (line.empty()) bad_file(name, line_no, "blank line");
        if (!saw_header) {
            if (line == "sample") {
                labeled = false;
            } else if (line == "sample,label") {
                labeled = true;
            } else {
                bad_file(name, line_no, "expected header 'sample' or 'sample,label'");
            }
            saw_header = true;
            continue;
        }
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != (labeled ? 2u : 1u))
            bad_file(name, line_no, "expected " + std::to_string(labeled ? 2 : 1) +
                                        " column(s), got " + std::to_string(cells.size()));
        segment.samples.push_back(parse_real_cell(name, line_no, cells[0]));
        if (labeled) {
            if (segment.label.empty())
                segment.label = cells[1];
            else if (segment.label != cells[1])
                bad_file(name, line_no, "label column changes from '" + segment.label + "' to '" +
                                            cells[1] + "'");
        }
    }
    if (!saw_header) throw DataError(name + ": empty file");
    if (segment.samples.empty()) throw DataError(name + ": no samples");
    return segment;
}

SignalSegment read_signal_csv(const std::string& path, double sample_rate) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open signal file '" + path + "'");
    return read_signal_csv(in, path, sample_rate);
}

void write_signal_csv(const SignalSegment& segment, std::ostream& out) {
    out << "sample\n";
    for (double v : segment.samples) out << detail::format_real(v) << "\n";
    if (!out) throw DataError("write failure while saving signal");
}

void write_signal_csv(const SignalSegment& segment, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    write_signal_csv(segment, out);
}

namespace {

// healthy_0031.csv → healthy; ir_0.007_12.csv → ir_0.007. A trailing
// _<digits> chunk is an index, everything before it identifies the class.
std::string filename_key(const std::filesystem::path& path) {
    std::string stem = path.stem().string();
    const std::size_t underscore = stem.rfind('_');
    if (underscore != std::string::npos && underscore + 1 < stem.size()) {
        const std::string tail = stem.substr(underscore + 1);
        if (std::all_of(tail.begin(), tail.end(), [](char c) { return c >= '0' && c <= '9'; }))
            stem.resize(underscore);
    }
    return stem;
}

} // namespace

std::vector<SignalSegment> load_signals(const std::string& path, double sample_rate,
                                        const std::map<std::string, std::string>& label_map) {
    namespace fs = std::filesystem;
    if (!fs::exists(path)) throw DataError("no such file or directory: '" + path + "'");

    std::vector<fs::path> files;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path))
            if (entry.is_regular_file() && entry.path().extension() == ".csv")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) throw DataError("no .csv files in directory '" + path + "'");
    } else {
        files.push_back(path);
    }

    std::vector<SignalSegment> signals;
    signals.reserve(files.size());
    for (const fs::path& file : files) {
        SignalSegment segment = read_signal_csv(file.string(), sample_rate);
        if (segment.label.empty()) {
            const std::string key = filename_key(file);
            if (label_map.empty()) {
                segment.label = key;
            } else {
                const auto it = label_map.find(key);
                if (it == label_map.end())
                    throw DataError("file '" + file.string() + "': key '" + key +
                                    "' not in the label map");
                segment.label = it->second;
            }
        }
        signals.push_back(std::move(segment));
    }
    return signals;
}

void save_features(const LabeledDataset& dataset, std::ostream& out) {
    dataset.validate();
    for (const std::string& label : dataset.labels) require_plain_label(label);

    out << "# k=" << dataset.meta.k << "\n";
    out << "# m=" << dataset.meta.m << "\n";
    out << "# wavelet=" << dataset.meta.wavelet << "\n";
    out << "# fs=" << detail::format_real(dataset.meta.sample_rate) << "\n";
    out << "# window=" << dataset.meta.window << "\n";
    const std::size_t s = dataset.feature_count();
    for (std::size_t j = 0; j < s; ++j) out << "f_" << j << ',';
    out << "label\n";
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        for (double v : dataset.rows[i]) out << detail::format_real(v) << ',';
        out << dataset.labels[i] << "\n";
    }
    if (!out) throw DataError("write failure while saving features");
}

void save_features(const LabeledDataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    save_features(dataset, out);
}

LabeledDataset load_features(std::istream& in, const std::string& name) {
    LabeledDataset dataset;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    std::size_t width = 0;
    bool have_k = false, have_m = false, have_wavelet = false, have_fs = false,
         have_window = false;

    while (next_line(in, line)) {
        ++line_no;
        if (!line.empty() && line[0] == '#') {
            std::string body = line.substr(1);
            if (!body.empty() && body[0] == ' ') body.erase(0, 1);
            const std::size_t eq = body.find('=');
            if (eq == std::string::npos) continue; // free-form comment
            const std::string key = body.substr(0, eq), value = body.substr(eq + 1);
            try {
                if (key == "k") {
                    dataset.meta.k = std::stoul(value);
                    have_k = true;
                } else if (key == "m") {
                    dataset.meta.m = std::stoul(value);
                    have_m = true;
                } else if (key == "wavelet") {
                    dataset.meta.wavelet = value;
                    have_wavelet = true;
                } else if (key == "fs") {
                    dataset.meta.sample_rate = parse_real_cell(name, line_no, value);
                    have_fs = true;
                } else if (key == "window") {
                    dataset.meta.window = std::stoul(value);
                    have_window = true;
                }
            } catch (const DataError&) {
                throw;
            } catch (const std::exception&) {
                bad_file(name, line_no, "bad metadata value '" + value + "'");
            }
            continue;
        }
        if (line.empty()) bad_file(name, line_no, "blank line");
        const std::vector<std::string> cells = split_csv_line(line);
        if (!saw_header) {
            if (cells.size() < 2 || cells.back() != "label")
                bad_file(name, line_no, "expected header 'f_0,...,label'");
            for (std::size_t j = 0; j + 1 < cells.size(); ++j)
                if (cells[j] != "f_" + std::to_string(j))
                    bad_file(name, line_no, "unexpected feature column '" + cells[j] + "'");
            width = cells.size() - 1;
            saw_header = true;
            continue;
        }
        if (cells.size() != width + 1)
            bad_file(name, line_no, "expected " + std::to_string(width + 1) + " cells, got " +
                                        std::to_string(cells.size()));
        std::vector<double> row(width);
        for (std::size_t j = 0; j < width; ++j)
            row[j] = parse_real_cell(name, line_no, cells[j]);
        if (cells.back().empty()) bad_file(name, line_no, "empty label");
        dataset.rows.push_back(std::move(row));
        dataset.labels.push_back(cells.back());
    }
    if (!saw_header) throw DataError(name + ": missing feature header");
    if (dataset.rows.empty()) throw DataError(name + ": no feature rows");
    if (!(have_k && have_m && have_wavelet && have_fs && have_window))
        throw DataError(name + ": missing metadata comments (# k=, # m=, # wavelet=, # fs=, "
                               "# window=)");
    return dataset;
}

LabeledDataset load_features(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open feature file '" + path + "'");
    return load_features(in, path);
}

namespace {

void apply_synth_key(SynthPlan& plan, SynthPlan::ClassPlan* current, const std::string& name,
                     std::size_t line_no, const std::string& key, const std::string& value) {
    const double real = [&] {
        char* end = nullptr;
        const double v = std::strtod(value.c_str(), &end);
        return (value.empty() || end == value.c_str() || *end != '\0')
                   ? std::numeric_limits<double>::quiet_NaN()
                   : v;
    }();
    auto need_real = [&]() -> double {
        if (std::isnan(real)) bad_file(name, line_no, "key '" + key + "' needs a number");
        return real;
    };

    // Before the first class block, fault keys set the inherited defaults.
    FaultSynthesisSpec& spec = current ? current->spec : plan.classes.front().spec;
    if (key == "fs") {
        if (current) bad_file(name, line_no, "fs applies to the whole plan; set it before "
                                             "the first class");
        plan.sample_rate = need_real();
    } else if (key == "seed") {
        if (current) bad_file(name, line_no, "seed applies to the whole plan");
        plan.seed = static_cast<std::uint64_t>(std::strtoull(value.c_str(), nullptr, 10));
    } else if (key == "count") {
        const double v = need_real();
        (current ? current->count : plan.classes.front().count) =
            static_cast<std::size_t>(v);
    } else if (key == "duration") {
        spec.duration = need_real();
    } else if (key == "fault_rate") {
        spec.fault_rate = need_real();
    } else if (key == "resonance") {
        spec.resonance_freq = need_real();
    } else if (key == "damping") {
        spec.damping = need_real();
    } else if (key == "amplitude") {
        spec.impulse_amplitude = need_real();
    } else if (key == "noise") {
        spec.noise_sigma = need_real();
    } else if (key == "ramp_to") {
        spec.speed_ramp = SpeedRamp{spec.fault_rate, need_real()};
    } else {
        bad_file(name, line_no, "unknown key '" + key + "'");
    }
}

} // namespace

SynthPlan parse_synth_plan(std::istream& in, const std::string& name) {
    SynthPlan plan;
    // Slot 0 holds the pre-class defaults; real classes copy from it.
    plan.classes.push_back({"", FaultSynthesisSpec{}, 1});

    std::string line;
    std::size_t line_no = 0;
    bool in_class = false;
    while (next_line(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
        std::size_t start = 0;
        while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
        line.erase(0, start);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) bad_file(name, line_no, "expected key=value");
        const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        if (key == "class") {
            if (value.empty()) bad_file(name, line_no, "class needs a label");
            SynthPlan::ClassPlan cls = plan.classes.front(); // inherit defaults
            cls.label = value;
            plan.classes.push_back(std::move(cls));
            in_class = true;
        } else {
            apply_synth_key(plan, in_class ? &plan.classes.back() : nullptr, name, line_no, key,
                            value);
        }
    }
    plan.classes.erase(plan.classes.begin()); // drop the defaults slot
    if (plan.classes.empty()) throw DataError(name + ": no class= blocks");
    for (const auto& cls : plan.classes) {
        require_plain_label(cls.label);
        if (cls.count == 0) throw DataError(name + ": class '" + cls.label + "' has count 0");
    }
    return plan;
}

SynthPlan parse_synth_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open synthesis plan '" + path + "'");
    return parse_synth_plan(in, path);
}

std::vector<SignalSegment> run_synth_plan(const SynthPlan& plan) {
    std::vector<SignalSegment> recordings;
    for (std::size_t c = 0; c < plan.classes.size(); ++c) {
        const SynthPlan::ClassPlan& cls = plan.classes[c];
        for (std::size_t r = 0; r < cls.count; ++r) {
            FaultSynthesisSpec spec = cls.spec;
            spec.sample_rate = plan.sample_rate;
            spec.rng_seed = detail::mix_seed(detail::mix_seed(plan.seed, detail::kStreamSynth, c), r);
            SignalSegment recording = synthesize_bearing_signal(spec);
            recording.label = cls.label;
            recordings.push_back(std::move(recording));
        }
    }
    return recordings;
}

} // namespace vibdiag
