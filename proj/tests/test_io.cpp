#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "vibdiag/cli.hpp"
#include "vibdiag/errors.hpp"
#include "vibdiag/forest.hpp"
#include "vibdiag/io.hpp"

using namespace vibdiag;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "vibdiag");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace

// ---- signal CSV -----------------------------------------------------------

TEST_CASE("signal files survive a write/read cycle bit for bit") {
    SignalSegment seg;
    seg.sample_rate = 12000.0;
    seg.samples = {1.0 / 3.0, 1e-300, -0.0, 1e300, -1.2345678901234567, 0.0, 42.0};

    std::ostringstream out;
    write_signal_csv(seg, out);
    std::istringstream in(out.str());
    const SignalSegment back = read_signal_csv(in, "mem", 12000.0);

    REQUIRE(back.samples.size() == seg.samples.size());
    for (std::size_t i = 0; i < seg.samples.size(); ++i)
        CHECK(same_bits(back.samples[i], seg.samples[i]));
    CHECK(back.sample_rate == 12000.0);
    CHECK(back.label.empty());

    std::ostringstream again;
    write_signal_csv(back, again);
    CHECK(again.str() == out.str());
}

TEST_CASE("signal CSV grammar") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return read_signal_csv(in, "mem", 100.0);
    };

    const SignalSegment labeled = parse("sample,label\n1.5,run\n2.5,run\n");
    CHECK(labeled.samples == std::vector<double>{1.5, 2.5});
    CHECK(labeled.label == "run");

    const SignalSegment crlf = parse("sample\r\n7.5\r\n");
    CHECK(crlf.samples == std::vector<double>{7.5});

    const SignalSegment commented = parse("# preamble\nsample\n# midstream\n3.25\n");
    CHECK(commented.samples == std::vector<double>{3.25});

    CHECK_THROWS_WITH_AS(parse("sample\n1.0\n\n2.0\n"), "mem:3: blank line", DataError);
    CHECK_THROWS_AS(parse("sample,label\n1,a\n2,b\n"), DataError); // label flips
    CHECK_THROWS_AS(parse("volts\n1.0\n"), DataError);             // bad header
    CHECK_THROWS_WITH_AS(parse(""), "mem: empty file", DataError);
    CHECK_THROWS_WITH_AS(parse("sample\n"), "mem: no samples", DataError);
    CHECK_THROWS_AS(parse("sample\nxyz\n"), DataError);   // not a number
    CHECK_THROWS_AS(parse("sample\n1,extra\n"), DataError); // column count

    std::istringstream in("sample\n1\n");
    CHECK_THROWS_AS(read_signal_csv(in, "mem", 0.0), DataError);
}

TEST_CASE("directory loading resolves labels from filenames") {
    oracle::TempDir dir("io_signals");
    write_text(dir.file("healthy_0000.csv"), "sample\n0.1\n");
    write_text(dir.file("healthy_0001.csv"), "sample\n0.2\n");
    write_text(dir.file("ir_007_12.csv"), "sample\n0.3\n");
    write_text(dir.file("plain.csv"), "sample\n0.4\n");
    write_text(dir.file("ignored.txt"), "not a csv\n");

    const auto signals = load_signals(dir.path.string(), 100.0);
    REQUIRE(signals.size() == 4);
    CHECK(signals[0].label == "healthy");
    CHECK(signals[1].label == "healthy");
    CHECK(signals[2].label == "ir_007"); // only the trailing _12 index is dropped
    CHECK(signals[3].label == "plain");
    CHECK(signals[0].samples == std::vector<double>{0.1}); // sorted by filename

    const std::map<std::string, std::string> label_map = {
        {"healthy", "H"}, {"ir_007", "I"}, {"plain", "P"}};
    const auto mapped = load_signals(dir.path.string(), 100.0, label_map);
    CHECK(mapped[0].label == "H");
    CHECK(mapped[2].label == "I");
    CHECK(mapped[3].label == "P");

    const std::map<std::string, std::string> partial = {{"healthy", "H"}};
    CHECK_THROWS_AS(load_signals(dir.path.string(), 100.0, partial), DataError);

    // an explicit label column beats every filename rule
    write_text(dir.file("odd_0.csv"), "sample,label\n0.5,special\n");
    const auto with_column = load_signals(dir.file("odd_0.csv"), 100.0, partial);
    CHECK(with_column[0].label == "special");

    CHECK_THROWS_AS(load_signals(dir.file("missing"), 100.0), DataError);
    oracle::TempDir empty("io_empty");
    CHECK_THROWS_AS(load_signals(empty.path.string(), 100.0), DataError);
}

// ---- feature CSV ------------------------------------------------------------

TEST_CASE("feature files round-trip and re-save byte-identically") {
    LabeledDataset data;
    data.meta = {2, 1, "db2", 8000.0, 64};
    data.rows = {{1.0 / 3.0, -2.5}, {3e-5, 4.0}};
    data.labels = {"a", "b"};

    std::ostringstream out;
    save_features(data, out);
    std::istringstream in(out.str());
    const LabeledDataset back = load_features(in, "mem");

    CHECK(back.meta == data.meta);
    CHECK(back.labels == data.labels);
    REQUIRE(back.rows.size() == 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(same_bits(back.rows[i][j], data.rows[i][j]));

    std::ostringstream again;
    save_features(back, again);
    CHECK(again.str() == out.str());
}

TEST_CASE("feature CSV grammar") {
    const std::string meta =
        "# k=2\n# m=1\n# wavelet=db2\n# fs=8000\n# window=64\n";
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return load_features(in, "mem");
    };

    CHECK_NOTHROW(parse(meta + "f_0,f_1,label\n1,2,a\n"));
    // meta comments may follow the data; only presence matters
    CHECK_NOTHROW(parse("f_0,f_1,label\n1,2,a\n" + meta));

    CHECK_THROWS_AS(parse("# k=2\n# m=1\n# wavelet=db2\n# fs=8000\n" // no window
                          "f_0,label\n1,a\n"),
                    DataError);
    CHECK_THROWS_AS(parse(meta + "f_0,f_2,label\n1,2,a\n"), DataError);  // column name
    CHECK_THROWS_AS(parse(meta + "justonecell\n"), DataError);           // bad header
    CHECK_THROWS_AS(parse(meta + "f_0,f_1,label\n1,2,a\n1,b\n"), DataError); // ragged
    CHECK_THROWS_AS(parse(meta + "f_0,f_1,label\n1,2,\n"), DataError);   // empty label
    CHECK_THROWS_AS(parse(meta + "f_0,f_1,label\n"), DataError);         // no rows
    CHECK_THROWS_AS(parse(meta), DataError);                             // no header
    CHECK_THROWS_AS(parse("# k=abc\n" + meta + "f_0,label\n1,a\n"), DataError);
    CHECK_THROWS_AS(parse(meta + "f_0,f_1,label\n1,oops,a\n"), DataError);

    LabeledDataset bad;
    bad.meta = {1, 1, "db1", 100.0, 8};
    bad.rows = {{1.0}};
    bad.labels = {"two words"};
    std::ostringstream sink;
    CHECK_THROWS_AS(save_features(bad, sink), DataError);
    bad.labels = {""};
    CHECK_THROWS_AS(save_features(bad, sink), DataError);
}

// ---- synthesis plans ----------------------------------------------------------

TEST_CASE("plan files: defaults, inheritance, ramps") {
    const std::string text =
        "# demo plan\n"
        "fs=4096\n"
        "seed=9\n"
        "duration=0.5\n"
        "noise=0.01\n"
        "count=2\n"
        "class=healthy\n"
        "\n"
        "class=inner   # trailing comment\n"
        "fault_rate=120\n"
        "resonance=900\n"
        "damping=500\n"
        "amplitude=1.5\n"
        "count=3\n"
        "\n"
        "class=swept\n"
        "fault_rate=60\n"
        "ramp_to=90\n";
    std::istringstream in(text);
    const SynthPlan plan = parse_synth_plan(in, "mem");

    CHECK(plan.sample_rate == 4096.0);
    CHECK(plan.seed == 9);
    REQUIRE(plan.classes.size() == 3);

    CHECK(plan.classes[0].label == "healthy");
    CHECK(plan.classes[0].count == 2);
    CHECK(plan.classes[0].spec.duration == 0.5);
    CHECK(plan.classes[0].spec.noise_sigma == 0.01);
    CHECK(plan.classes[0].spec.fault_rate == 0.0);

    CHECK(plan.classes[1].label == "inner");
    CHECK(plan.classes[1].count == 3);
    CHECK(plan.classes[1].spec.fault_rate == 120.0);
    CHECK(plan.classes[1].spec.resonance_freq == 900.0);
    CHECK(plan.classes[1].spec.damping == 500.0);
    CHECK(plan.classes[1].spec.impulse_amplitude == 1.5);
    CHECK(plan.classes[1].spec.noise_sigma == 0.01); // inherited

    CHECK(plan.classes[2].count == 2); // inherited default
    REQUIRE(plan.classes[2].spec.speed_ramp.has_value());
    CHECK(plan.classes[2].spec.speed_ramp->start_rate == 60.0);
    CHECK(plan.classes[2].spec.speed_ramp->end_rate == 90.0);
}

TEST_CASE("plan files: rejected shapes") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_synth_plan(in, "mem");
    };
    CHECK_THROWS_AS(parse("class=a\nfs=100\n"), DataError);
    CHECK_THROWS_AS(parse("class=a\nseed=1\n"), DataError);
    CHECK_THROWS_AS(parse("wibble=3\nclass=a\n"), DataError);
    CHECK_THROWS_AS(parse("class=\n"), DataError);
    CHECK_THROWS_AS(parse("class=a\nnot a pair\n"), DataError);
    CHECK_THROWS_AS(parse("fs=100\n"), DataError); // no classes
    CHECK_THROWS_AS(parse("class=a\ncount=0\n"), DataError);
    CHECK_THROWS_AS(parse("class=two words\n"), DataError);
    CHECK_THROWS_AS(parse("class=a\nduration=abc\n"), DataError);
}

TEST_CASE("plan runs are deterministic and honor counts") {
    SynthPlan plan;
    plan.sample_rate = 2048.0;
    plan.seed = 77;
    SynthPlan::ClassPlan healthy{"healthy", {}, 2};
    healthy.spec.duration = 0.25;
    healthy.spec.noise_sigma = 0.1;
    healthy.spec.resonance_freq = 500.0;
    SynthPlan::ClassPlan fault = healthy;
    fault.label = "fault";
    fault.count = 3;
    fault.spec.fault_rate = 40.0;
    plan.classes = {healthy, fault};

    const auto first = run_synth_plan(plan);
    REQUIRE(first.size() == 5);
    for (const SignalSegment& r : first) CHECK(r.samples.size() == 512);
    CHECK(first[0].label == "healthy");
    CHECK(first[1].label == "healthy");
    CHECK(first[2].label == "fault");
    CHECK(first[4].label == "fault");
    CHECK(first[0].samples != first[1].samples); // per-recording substreams

    const auto second = run_synth_plan(plan);
    for (std::size_t i = 0; i < first.size(); ++i)
        CHECK(second[i].samples == first[i].samples);

    plan.seed = 78;
    const auto reseeded = run_synth_plan(plan);
    CHECK(reseeded[0].samples != first[0].samples);
}

// ---- the command-line pipeline --------------------------------------------------

TEST_CASE("synth -> extract -> train -> evaluate -> predict") {
    oracle::TempDir dir("cli_pipeline");
    const std::string plan = dir.file("plan.txt");
    write_text(plan,
               "fs=4096\nseed=5\nduration=1\nnoise=0.05\nresonance=800\ndamping=400\ncount=3\n"
               "class=healthy\n"
               "class=fault\nfault_rate=60\n");
    const std::string sigdir = dir.file("signals");
    REQUIRE(run({"synth", plan, "--out", sigdir}) == 0);
    CHECK(std::filesystem::exists(sigdir + "/healthy_0000.csv"));
    CHECK(std::filesystem::exists(sigdir + "/healthy_0002.csv"));
    CHECK(std::filesystem::exists(sigdir + "/fault_0002.csv"));

    const std::string feat = dir.file("features.csv");
    REQUIRE(run({"extract", sigdir, "--fs", "4096", "--window", "512", "--k", "2", "--m", "1",
                 "--out", feat}) == 0);
    const LabeledDataset data = load_features(feat);
    CHECK(data.feature_count() == 4);
    CHECK(data.size() == 48); // 6 recordings x 8 windows
    CHECK(data.meta.k == 2);
    CHECK(data.meta.wavelet == "db4");
    CHECK(data.meta.window == 512);

    // the documented sizing example: k=3, m=1 on 600-sample windows -> 8 columns
    const std::string feat8 = dir.file("features8.csv");
    REQUIRE(run({"extract", sigdir, "--fs", "4096", "--window", "600", "--k", "3", "--out",
                 feat8}) == 0);
    CHECK(load_features(feat8).feature_count() == 8);

    const std::string model = dir.file("model.txt");
    REQUIRE(run({"train", feat, "--out", model, "--trees", "15", "--seed", "3"}) == 0);
    const ForestModel forest = load_forest(model);
    CHECK(forest.classes == std::vector<std::string>{"fault", "healthy"});
    CHECK(forest.trees.size() == 15);
    CHECK(forest.meta.window == 512);

    const std::string report = dir.file("report.txt");
    REQUIRE(run({"evaluate", model, feat, "--out", report}) == 0);
    const std::string text = slurp(report);
    CHECK(text.rfind("samples 48\n", 0) == 0);
    CHECK(text.find("confusion rows=true cols=predicted order: fault healthy") !=
          std::string::npos);

    REQUIRE(run({"predict", model, sigdir + "/healthy_0000.csv", "--fs", "4096"}) == 0);
    CHECK(run({"predict", model, sigdir + "/healthy_0000.csv", "--fs", "8000"}) == 2);
}

TEST_CASE("baseline extraction produces prediction-incompatible features") {
    oracle::TempDir dir("cli_baseline");
    const std::string plan = dir.file("plan.txt");
    write_text(plan,
               "fs=2048\nseed=2\nduration=0.5\nnoise=0.05\nresonance=500\ndamping=300\ncount=2\n"
               "class=healthy\n"
               "class=fault\nfault_rate=50\n");
    const std::string sigdir = dir.file("signals");
    REQUIRE(run({"synth", plan, "--out", sigdir}) == 0);

    const std::string feat = dir.file("baseline.csv");
    REQUIRE(run({"extract", sigdir, "--fs", "2048", "--window", "256", "--baseline", "raw",
                 "--out", feat}) == 0);
    const LabeledDataset data = load_features(feat);
    CHECK(data.feature_count() == 4); // mean, crest, kurtosis, entropy
    CHECK(data.meta.wavelet.empty());

    const std::string per_leaf = dir.file("per_leaf.csv");
    REQUIRE(run({"extract", sigdir, "--fs", "2048", "--window", "256", "--k", "2", "--baseline",
                 "per-leaf", "--out", per_leaf}) == 0);
    CHECK(load_features(per_leaf).feature_count() == 16); // 4 stats x 4 leaves

    const std::string model = dir.file("model.txt");
    REQUIRE(run({"train", feat, "--out", model, "--trees", "5"}) == 0);
    // a baseline model carries no wavelet, so signal-level prediction is refused
    CHECK(run({"predict", model, sigdir + "/healthy_0000.csv", "--fs", "2048"}) == 2);
}

TEST_CASE("select-wavelet and bench run from the command line") {
    oracle::TempDir dir("cli_misc");
    const std::string plan = dir.file("plan.txt");
    write_text(plan,
               "fs=2048\nseed=4\nduration=0.25\nnoise=0.05\nresonance=400\ndamping=300\ncount=1\n"
               "class=healthy\n"
               "class=fault\nfault_rate=60\n");
    const std::string sigdir = dir.file("signals");
    REQUIRE(run({"synth", plan, "--out", sigdir}) == 0);

    const std::string sel = dir.file("selection.csv");
    REQUIRE(run({"select-wavelet", sigdir, "--fs", "2048", "--kmax", "3", "--window", "256",
                 "--candidates", "db1,db4", "--out", sel}) == 0);
    const auto sel_text = slurp(sel);
    CHECK(sel_text.rfind("wavelet,level,energy,entropy,ratio\n", 0) == 0);
    // 2 candidates x 3 levels = 6 data lines
    CHECK(std::count(sel_text.begin(), sel_text.end(), '\n') == 7);

    const std::string rep = dir.file("delay.csv");
    const std::string avg = dir.file("avg.csv");
    REQUIRE(run({"bench", "--plan", plan, "--windows", "256", "--levels", "2", "--peaks", "1",
                 "--warmup", "1", "--reps", "5", "--out", rep, "--avg-out", avg}) == 0);
    const auto rep_text = slurp(rep);
    CHECK(rep_text.rfind("# env: ", 0) == 0);
    CHECK(rep_text.find("\nN_o,T_vin_s,k,m,S,Tp_median_s,Tp_mean_s,Tp_p95_s,tau_d_s\n") !=
          std::string::npos);
    CHECK(slurp(avg).rfind("view,key,mean_tau_d_s\n", 0) == 0);
}

TEST_CASE("exit codes separate usage, data, and success") {
    oracle::TempDir dir("cli_exits");
    write_text(dir.file("sig.csv"), "sample\n1\n2\n3\n4\n5\n6\n7\n8\n");
    write_text(dir.file("garbage.csv"), "this is not a feature file\n");

    CHECK(run({"--help"}) == 0);
    CHECK(run({}) == 1);          // a subcommand is required
    CHECK(run({"bogus"}) == 1);   // unknown subcommand
    CHECK(run({"extract", dir.file("sig.csv"), "--fs", "-5", "--window", "8"}) == 1);
    CHECK(run({"extract", dir.file("sig.csv"), "--fs", "100", "--window", "6", "--k", "2"}) ==
          1); // 6 not divisible by 4
    CHECK(run({"extract", dir.file("nope.csv"), "--fs", "100", "--window", "8", "--k", "2"}) ==
          2); // missing input
    CHECK(run({"train", dir.file("garbage.csv")}) == 2);
    CHECK(run({"evaluate", dir.file("nope.txt"), dir.file("garbage.csv")}) == 2);
}
