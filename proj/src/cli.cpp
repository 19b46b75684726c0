#include "vibdiag/cli.hpp"

#include "vibdiag/bench.hpp"
#include "vibdiag/detail/format.hpp"
#include "vibdiag/errors.hpp"
#include "vibdiag/features.hpp"
#include "vibdiag/forest.hpp"
#include "vibdiag/io.hpp"
#include "vibdiag/metrics.hpp"
#include "vibdiag/selection.hpp"
#include "vibdiag/tune.hpp"
#include "vibdiag/wavelet.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace vibdiag {

namespace {

// Flag-level mistakes (bad combinations, violated config invariants) exit
// with the usage status, unlike data errors found inside files.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_divisible(std::size_t window, std::size_t k) {
    if (k == 0) throw UsageError("decomposition level k must be at least 1");
    const std::size_t stride = std::size_t{1} << k;
    if (window % stride != 0)
        throw UsageError("window " + std::to_string(window) + " is not divisible by 2^k = " +
                         std::to_string(stride));
}

std::map<std::string, std::string> parse_label_map(const std::vector<std::string>& entries) {
    std::map<std::string, std::string> map;
    for (const std::string& entry : entries) {
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size())
            throw UsageError("--label-map entries look like key=class, got '" + entry + "'");
        map[entry.substr(0, eq)] = entry.substr(eq + 1);
    }
    return map;
}

std::string ratio_cell(const SelectionScore& s) {
    return s.concentrated ? "inf" : detail::format_real(s.ratio);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    return out;
}

// ---- synth ----------------------------------------------------------------

int cmd_synth(const std::string& plan_path, const std::string& out_dir, bool seed_set,
              std::uint64_t seed) {
    SynthPlan plan = parse_synth_plan(plan_path);
    if (seed_set) plan.seed = seed;

    std::filesystem::create_directories(out_dir);
    const std::vector<SignalSegment> recordings = run_synth_plan(plan);
    std::map<std::string, std::size_t> counter;
    for (const SignalSegment& recording : recordings) {
        char index[16];
        std::snprintf(index, sizeof(index), "%04zu", counter[recording.label]++);
        const std::string path =
            out_dir + "/" + recording.label + "_" + index + ".csv";
        write_signal_csv(recording, path);
    }
    for (const auto& [label, count] : counter)
        std::cout << "wrote " << count << " recording(s) for class " << label << "\n";
    return 0;
}

// ---- extract --------------------------------------------------------------

int cmd_extract(const std::string& input, const std::string& out_path, double fs,
                std::size_t window, std::size_t hop, std::size_t k, std::size_t m,
                const std::string& wavelet, const std::vector<std::string>& label_map_entries,
                const std::string& baseline) {
    if (hop == 0) hop = window;
    if (baseline.empty()) require_divisible(window, k);

    const auto label_map = parse_label_map(label_map_entries);
    const std::vector<SignalSegment> signals = load_signals(input, fs, label_map);

    LabeledDataset dataset;
    const std::string canonical = baseline == "raw" ? "" : wavelet_filters(wavelet).name;
    dataset.meta = {baseline == "raw" ? 0 : k, baseline.empty() ? m : 0, canonical, fs, window};

    for (const SignalSegment& signal : signals) {
        for (const SignalSegment& seg : segment_signal(signal, window, hop)) {
            std::vector<double> row;
            if (baseline.empty()) {
                row = extract_features(seg, k, m, wavelet).values;
            } else if (baseline == "raw") {
                const BaselineFeatures b = baseline_features(seg);
                row = {b.mean, b.crest_factor, b.kurtosis, b.shannon_entropy};
            } else { // per-leaf
                for (const BaselineFeatures& b : baseline_features_per_leaf(seg, k, wavelet)) {
                    row.push_back(b.mean);
                    row.push_back(b.crest_factor);
                    row.push_back(b.kurtosis);
                    row.push_back(b.shannon_entropy);
                }
            }
            dataset.rows.push_back(std::move(row));
            dataset.labels.push_back(seg.label);
        }
    }

    auto out = open_out(out_path);
    save_features(dataset, out);
    std::cout << "extracted " << dataset.size() << " feature vector(s) of length "
              << dataset.feature_count() << " -> " << out_path << "\n";
    return 0;
}

// ---- select-wavelet -------------------------------------------------------

int cmd_select(const std::string& input, const std::string& out_path, double fs,
               std::size_t window, std::size_t hop, std::size_t k_max,
               std::vector<std::string> candidates, bool mean_over_segments) {
    if (candidates.empty()) candidates = {"db1", "db2", "db4", "db8"};
    const std::vector<SignalSegment> signals = load_signals(input, fs);

    std::vector<SignalSegment> segments;
    const std::size_t stride = std::size_t{1} << k_max;
    if (window > 0) {
        require_divisible(window, k_max);
        if (hop == 0) hop = window;
        for (const SignalSegment& signal : signals)
            for (SignalSegment& seg : segment_signal(signal, window, hop))
                segments.push_back(std::move(seg));
    } else {
        for (const SignalSegment& signal : signals) {
            const std::size_t usable = signal.samples.size() / stride * stride;
            if (usable == 0)
                throw DataError("signal shorter than 2^kmax = " + std::to_string(stride));
            if (usable != signal.samples.size())
                std::cerr << "note: using the first " << usable << " of "
                          << signal.samples.size() << " samples (divisibility by " << stride
                          << ")\n";
            SignalSegment seg = signal;
            seg.samples.resize(usable);
            segments.push_back(std::move(seg));
        }
    }
    if (!mean_over_segments && segments.size() > 1) segments.resize(1);

    const SelectionResult result = mean_over_segments
                                       ? select_wavelet_and_level(segments, candidates, k_max)
                                       : select_wavelet_and_level(segments[0], candidates, k_max);

    auto out = open_out(out_path);
    out << "wavelet,level,energy,entropy,ratio\n";
    for (const SelectionScore& s : result.table)
        out << s.wavelet << ',' << s.level << ',' << detail::format_real(s.energy) << ','
            << detail::format_real(s.entropy) << ',' << ratio_cell(s) << "\n";

    std::cout << "best wavelet=" << result.best_wavelet << " level=" << result.best_level
              << "\n";
    return 0;
}

// ---- train ----------------------------------------------------------------

int cmd_train(const std::string& features_path, const std::string& out_path, std::uint64_t seed,
              std::size_t tune_budget, std::size_t folds, const ForestHyperparams& manual,
              const std::string& trials_out) {
    const LabeledDataset train = load_features(features_path);

    ForestHyperparams hp = manual;
    if (tune_budget > 0) {
        const ForestTuneResult tuned = tune_forest(train, tune_budget, seed, folds);
        hp = tuned.best;
        if (!trials_out.empty()) {
            auto out = open_out(trials_out);
            out << "trial,n_trees,max_depth,min_samples_leaf,features_per_split,objective\n";
            for (std::size_t t = 0; t < tuned.log.trials.size(); ++t) {
                const TuneTrial& trial = tuned.log.trials[t];
                out << t;
                for (double v : trial.values) out << ',' << detail::format_real(v);
                out << ',' << detail::format_real(trial.objective) << "\n";
            }
        }
        if (tuned.log.flat)
            std::cerr << "warning: every trial scored the same; keeping the first trial's "
                         "hyperparameters\n";
        std::cout << "tuned cv_accuracy=" << detail::format_real(tuned.log.best_objective)
                  << "\n";
    }

    const ForestModel model = train_forest(train, hp, seed);
    save_forest(model, out_path);
    std::cout << "trained forest: n_trees=" << hp.n_trees << " max_depth=" << hp.max_depth
              << " min_samples_leaf=" << hp.min_samples_leaf
              << " features_per_split=" << hp.features_per_split << " classes="
              << model.classes.size() << " -> " << out_path << "\n";
    return 0;
}

// ---- evaluate -------------------------------------------------------------

int cmd_evaluate(const std::string& model_path, const std::string& features_path,
                 const std::string& out_path) {
    const ForestModel model = load_forest(model_path);
    const LabeledDataset test = load_features(features_path);
    const EvaluationReport report = evaluate(model, test);
    const std::string text = format_report(report);
    std::cout << text;
    if (!out_path.empty()) {
        auto out = open_out(out_path);
        out << text;
    }
    return 0;
}

// ---- predict --------------------------------------------------------------

int cmd_predict(const std::string& model_path, const std::string& signal_path, double fs,
                std::size_t window, std::size_t warmup, std::size_t reps) {
    const ForestModel model = load_forest(model_path);
    if (model.meta.wavelet.empty())
        throw DataError("model carries no extraction metadata; cannot predict from a raw signal");
    if (model.meta.sample_rate > 0.0 && fs != model.meta.sample_rate)
        throw DataError("sample rate " + detail::format_real(fs) +
                        " does not match the model's " +
                        detail::format_real(model.meta.sample_rate));

    if (window == 0) window = model.meta.window;
    if (model.meta.window > 0 && window != model.meta.window)
        throw UsageError("--window " + std::to_string(window) + " conflicts with the model's " +
                         std::to_string(model.meta.window));

    const SignalSegment signal = read_signal_csv(signal_path, fs);
    if (window == 0) window = signal.samples.size();
    const SignalSegment segment = segment_signal(signal, window, window).front();

    Prediction pred;
    const TimingStats stats = measure_processing_time(
        [&] {
            const FeatureVector fv =
                extract_features(segment, model.meta.k, model.meta.m, model.meta.wavelet);
            pred = predict(model, fv.values);
        },
        warmup, reps);

    const double t_vin = segment_duration(window, fs);
    std::cout << "class=" << pred.class_name << "\n";
    std::cout << "probabilities:";
    for (std::size_t c = 0; c < model.classes.size(); ++c)
        std::cout << ' ' << model.classes[c] << '=' << detail::format_real(pred.probabilities[c]);
    std::cout << "\n";
    std::cout << "T_vin=" << detail::format_real(t_vin)
              << " s Tp_median=" << detail::format_real(stats.median_s)
              << " s tau_d=" << detail::format_real(t_vin + stats.median_s) << " s\n";
    if (stats.coarse_clock)
        std::cerr << "warning: clock resolution is coarse relative to the measured median\n";
    return 0;
}

// ---- bench ----------------------------------------------------------------

std::vector<SignalSegment> default_bench_recordings(double fs, std::uint64_t seed) {
    SynthPlan plan;
    plan.sample_rate = fs;
    plan.seed = seed;
    FaultSynthesisSpec base;
    base.duration = 1.0;
    base.noise_sigma = 0.05;

    SynthPlan::ClassPlan healthy{"healthy", base, 1};
    SynthPlan::ClassPlan inner{"inner", base, 1};
    inner.spec.fault_rate = 162.0;
    inner.spec.resonance_freq = 3400.0;
    SynthPlan::ClassPlan outer{"outer", base, 1};
    outer.spec.fault_rate = 107.0;
    outer.spec.resonance_freq = 2100.0;
    plan.classes = {healthy, inner, outer};
    return run_synth_plan(plan);
}

int cmd_bench(const std::string& plan_path, const std::string& out_path,
              const std::string& avg_out_path, double fs, std::vector<std::size_t> windows,
              std::vector<std::size_t> levels, std::vector<std::size_t> peaks,
              const DelaySweepOptions& options, std::uint64_t seed) {
    std::vector<SignalSegment> recordings;
    if (plan_path.empty()) {
        recordings = default_bench_recordings(fs, seed);
    } else {
        SynthPlan plan = parse_synth_plan(plan_path);
        recordings = run_synth_plan(plan);
    }

    DelayGrid grid{std::move(windows), std::move(levels), std::move(peaks)};
    const DelayReport report = delay_sweep(grid, recordings, options, seed);

    auto out = open_out(out_path);
    write_delay_report_csv(report, out);
    if (!avg_out_path.empty()) {
        auto avg = open_out(avg_out_path);
        write_averaged_views_csv(report, avg);
    }

    std::cout << "measured " << report.rows.size() << " grid cell(s) -> " << out_path << "\n";
    for (const std::string& note : report.notes) std::cout << "note: " << note << "\n";
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Vibration-based bearing fault diagnosis: wavelet-packet spectral features, "
                 "a random-forest classifier, and reaction-delay benchmarking"};
    app.require_subcommand(1);
    app.set_config("--config");

    // synth
    std::string synth_plan, synth_out = "signals";
    std::uint64_t synth_seed = 0;
    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
    synth->add_option("plan", synth_plan, "synthesis plan file (key=value)")->required();
    synth->add_option("--out", synth_out, "output directory");
    auto* synth_seed_opt = synth->add_option("--seed", synth_seed, "override the plan's seed");

    // extract
    std::string ex_input, ex_out = "features.csv", ex_wavelet = "db4", ex_baseline;
    double ex_fs = 0.0;
    std::size_t ex_window = 0, ex_hop = 0, ex_k = 3, ex_m = 1;
    std::vector<std::string> ex_label_map;
    auto* extract = app.add_subcommand("extract", "Signals to a feature CSV");
    extract->add_option("input", ex_input, "signal CSV file or directory")->required();
    extract->add_option("--fs", ex_fs, "sampling rate, Hz")->required()
        ->check(CLI::PositiveNumber);
    extract->add_option("--window", ex_window, "segment length N_o, samples")->required()
        ->check(CLI::PositiveNumber);
    extract->add_option("--hop", ex_hop, "segment hop, samples (default: window)");
    extract->add_option("--k", ex_k, "decomposition level");
    extract->add_option("--m", ex_m, "spectral peaks per leaf");
    extract->add_option("--wavelet", ex_wavelet, "base wavelet (db1/db2/db4/db8)");
    extract->add_option("--label-map", ex_label_map,
                        "filename-key=class entries (repeatable)");
    extract->add_option("--baseline", ex_baseline,
                        "emit baseline spectral statistics instead: raw or per-leaf")
        ->check(CLI::IsMember({"raw", "per-leaf"}));
    extract->add_option("--out", ex_out, "output feature CSV");

    // select-wavelet
    std::string sel_input, sel_out = "selection.csv";
    double sel_fs = 0.0;
    std::size_t sel_window = 0, sel_hop = 0, sel_kmax = 5;
    std::vector<std::string> sel_candidates;
    bool sel_mean = false;
    auto* select = app.add_subcommand("select-wavelet",
                                      "Score candidate wavelets and levels by energy/entropy");
    select->add_option("input", sel_input, "signal CSV file or directory")->required();
    select->add_option("--fs", sel_fs, "sampling rate, Hz")->required()
        ->check(CLI::PositiveNumber);
    select->add_option("--kmax", sel_kmax, "deepest level to score");
    select->add_option("--candidates", sel_candidates, "candidate wavelets")->delimiter(',');
    select->add_option("--window", sel_window,
                       "segment length (default: whole signal, truncated to divisibility)");
    select->add_option("--hop", sel_hop, "segment hop (default: window)");
    select->add_flag("--mean", sel_mean, "average scores over all segments instead of "
                                         "scoring the first");
    select->add_option("--out", sel_out, "output score CSV");

    // train
    std::string tr_features, tr_out = "model.txt", tr_trials_out;
    std::uint64_t tr_seed = 0;
    std::size_t tr_budget = 0, tr_folds = 5;
    ForestHyperparams tr_hp;
    auto* train = app.add_subcommand("train", "Train (optionally tune) a random forest");
    train->add_option("features", tr_features, "feature CSV")->required();
    train->add_option("--out", tr_out, "output model file");
    train->add_option("--seed", tr_seed, "training seed");
    train->add_option("--tune-budget", tr_budget,
                      "Bayesian-optimization evaluations; 0 = no tuning");
    train->add_option("--folds", tr_folds, "CV folds for the tuning objective")
        ->check(CLI::Range(std::size_t{2}, std::size_t{20}));
    train->add_option("--trees", tr_hp.n_trees, "trees (untuned runs)");
    train->add_option("--max-depth", tr_hp.max_depth, "depth cap (untuned runs)");
    train->add_option("--min-leaf", tr_hp.min_samples_leaf, "min samples per leaf");
    train->add_option("--features-per-split", tr_hp.features_per_split,
                      "features tried per split; 0 = ceil(sqrt(S))");
    train->add_option("--trials-out", tr_trials_out, "write the tuning trial log CSV here");

    // evaluate
    std::string ev_model, ev_features, ev_out;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Accuracy / AUC / confusion of a model");
    evaluate_cmd->add_option("model", ev_model, "model file")->required();
    evaluate_cmd->add_option("features", ev_features, "feature CSV")->required();
    evaluate_cmd->add_option("--out", ev_out, "also write the report here");

    // predict
    std::string pr_model, pr_signal;
    double pr_fs = 0.0;
    std::size_t pr_window = 0, pr_warmup = 2, pr_reps = 7;
    auto* predict_cmd = app.add_subcommand("predict",
                                           "Classify one segment and report the system delay");
    predict_cmd->add_option("model", pr_model, "model file")->required();
    predict_cmd->add_option("signal", pr_signal, "signal CSV")->required();
    predict_cmd->add_option("--fs", pr_fs, "sampling rate, Hz")->required()
        ->check(CLI::PositiveNumber);
    predict_cmd->add_option("--window", pr_window, "segment length (default: model's)");
    predict_cmd->add_option("--warmup", pr_warmup, "untimed warmup runs");
    predict_cmd->add_option("--reps", pr_reps, "timed repetitions (min 5)");

    // bench
    std::string bn_plan, bn_out = "delay_report.csv", bn_avg_out;
    double bn_fs = 12000.0;
    std::uint64_t bn_seed = 0;
    std::vector<std::size_t> bn_windows = {300, 600, 1200, 2400};
    std::vector<std::size_t> bn_levels = {2, 3, 5};
    std::vector<std::size_t> bn_peaks = {1, 2, 3};
    DelaySweepOptions bn_options;
    bool bn_no_align = false;
    auto* bench = app.add_subcommand("bench", "Sweep the (N_o, k, m) grid and report delays");
    bench->add_option("--plan", bn_plan, "synthesis plan for the benchmark data "
                                         "(default: built-in 3-class plan)");
    bench->add_option("--fs", bn_fs, "sampling rate for the built-in plan")
        ->check(CLI::PositiveNumber);
    bench->add_option("--windows", bn_windows, "N_o grid")->delimiter(',');
    bench->add_option("--levels", bn_levels, "k grid")->delimiter(',');
    bench->add_option("--peaks", bn_peaks, "m grid")->delimiter(',');
    bench->add_option("--wavelet", bn_options.wavelet, "base wavelet");
    bench->add_option("--warmup", bn_options.warmup, "untimed warmup runs per cell");
    bench->add_option("--reps", bn_options.reps, "timed repetitions per cell (min 5)");
    bench->add_flag("--no-align", bn_no_align,
                    "skip grid cells whose window is not divisible by 2^k instead of rounding");
    bench->add_option("--seed", bn_seed, "seed for data synthesis and training");
    bench->add_option("--out", bn_out, "report CSV path");
    bench->add_option("--avg-out", bn_avg_out, "averaged-views CSV path");

    try {
        app.parse(argc, argv);

        if (synth->parsed())
            return cmd_synth(synth_plan, synth_out, !synth_seed_opt->empty(), synth_seed);
        if (extract->parsed())
            return cmd_extract(ex_input, ex_out, ex_fs, ex_window, ex_hop, ex_k, ex_m, ex_wavelet,
                               ex_label_map, ex_baseline);
        if (select->parsed())
            return cmd_select(sel_input, sel_out, sel_fs, sel_window, sel_hop, sel_kmax,
                              sel_candidates, sel_mean);
        if (train->parsed())
            return cmd_train(tr_features, tr_out, tr_seed, tr_budget, tr_folds, tr_hp,
                             tr_trials_out);
        if (evaluate_cmd->parsed()) return cmd_evaluate(ev_model, ev_features, ev_out);
        if (predict_cmd->parsed())
            return cmd_predict(pr_model, pr_signal, pr_fs, pr_window, pr_warmup, pr_reps);
        if (bench->parsed()) {
            bn_options.align_windows = !bn_no_align;
            return cmd_bench(bn_plan, bn_out, bn_avg_out, bn_fs, bn_windows, bn_levels, bn_peaks,
                             bn_options, bn_seed);
        }
        return 1; // unreachable: require_subcommand(1)
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace vibdiag
