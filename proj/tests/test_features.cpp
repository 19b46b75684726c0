#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "vibdiag/errors.hpp"
#include "vibdiag/features.hpp"
#include "vibdiag/wavelet.hpp"

using namespace vibdiag;

namespace {

SignalSegment make_segment(std::size_t n, double fs, std::uint64_t seed) {
    SignalSegment seg;
    seg.samples = oracle::random_vector(n, seed);
    seg.sample_rate = fs;
    return seg;
}

} // namespace

TEST_CASE("feature vector length is m * 2^k") {
    const SignalSegment seg = make_segment(256, 1000.0, 3);
    for (std::size_t k : {1, 2, 3, 4, 5}) {
        for (std::size_t m : {1, 2, 3}) {
            const FeatureVector fv = extract_features(seg, k, m, "db4");
            INFO("k=", k, " m=", m);
            CHECK(fv.values.size() == m * (std::size_t{1} << k));
            CHECK(fv.k == k);
            CHECK(fv.m == m);
            CHECK(fv.wavelet == "db4");
        }
    }
    CHECK(extract_features(seg, 2, 1, "haar").wavelet == "db1");
}

TEST_CASE("features scale linearly with the signal") {
    // Peaks sit at fixed frequencies, so amplitude * frequency is linear in
    // the waveform; doubling the input must exactly double every feature.
    const SignalSegment seg = make_segment(128, 2000.0, 9);
    SignalSegment twice = seg;
    for (double& v : twice.samples) v *= 2.0;

    const auto base = extract_features(seg, 3, 2, "db2").values;
    const auto scaled = extract_features(twice, 3, 2, "db2").values;
    REQUIRE(base.size() == scaled.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(scaled[i] == doctest::Approx(2.0 * base[i]).epsilon(1e-12));
}

TEST_CASE("a single elementary waveform lights up only its own leaf block") {
    const SignalSegment seg = make_segment(128, 2000.0, 21);
    const PacketTree tree = wpt_decompose(seg, 3, "db4");
    const auto atoms = reconstruct_leaves(tree);

    SignalSegment atom;
    atom.samples = atoms[6];
    atom.sample_rate = seg.sample_rate;
    const FeatureVector fv = extract_features(atom, 3, 2, "db4");
    REQUIRE(fv.values.size() == 16);

    double own = 0.0, rest = 0.0;
    for (std::size_t j = 0; j < 8; ++j)
        for (std::size_t r = 0; r < 2; ++r)
            (j == 6 ? own : rest) += std::abs(fv.values[j * 2 + r]);
    CHECK(own > 0.0);
    CHECK(rest < 1e-8 * own); // leaf-major layout: block 6 holds the energy
}

TEST_CASE("extract_features input validation") {
    const SignalSegment seg = make_segment(64, 1000.0, 5);
    CHECK_THROWS_AS(extract_features(seg, 3, 0, "db1"), DataError);
    // peaks are drawn from the spectrum of each full-length leaf waveform,
    // so 64 samples leave 32 non-DC bins regardless of the level
    CHECK(extract_features(seg, 4, 3, "db1").values.size() == 48);
    CHECK_THROWS_AS(extract_features(seg, 1, 33, "db1"), DataError);
    CHECK_THROWS_AS(extract_features(seg, 3, 1, "coif1"), InvariantError);
}

TEST_CASE("baseline statistics of a pure tone spectrum, by hand") {
    // N=8 sine on bin 2: amplitude spectrum is {0,0,1,0,0}. mean 0.2,
    // crest 1/sqrt(0.2), kurtosis 3.25, entropy 0 (a point mass).
    SignalSegment seg;
    seg.sample_rate = 8.0;
    seg.samples.resize(8);
    for (std::size_t t = 0; t < 8; ++t)
        seg.samples[t] = std::sin(2.0 * std::numbers::pi * 2.0 * static_cast<double>(t) / 8.0);

    const BaselineFeatures b = baseline_features(seg);
    CHECK(b.mean == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(b.crest_factor == doctest::Approx(std::sqrt(5.0)).epsilon(1e-9));
    CHECK(b.kurtosis == doctest::Approx(3.25).epsilon(1e-9));
    CHECK(b.shannon_entropy == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("baseline statistics reject degenerate input") {
    SignalSegment zero;
    zero.sample_rate = 8.0;
    zero.samples.assign(16, 0.0);
    CHECK_THROWS_AS(baseline_features(zero), DataError); // all-zero spectrum

    SignalSegment tiny;
    tiny.sample_rate = 8.0;
    tiny.samples = {1.0, 2.0};
    CHECK_THROWS_AS(baseline_features(tiny), DataError);
}

TEST_CASE("per-leaf baseline variant emits one block per leaf") {
    const SignalSegment seg = make_segment(128, 2000.0, 33);
    const auto blocks = baseline_features_per_leaf(seg, 3, "db2");
    REQUIRE(blocks.size() == 8);
    for (const BaselineFeatures& b : blocks) {
        CHECK(b.mean > 0.0);
        CHECK(b.crest_factor >= 1.0); // peak >= rms always
        CHECK(b.shannon_entropy >= 0.0);
        // each leaf is rendered as a 128-sample waveform -> 65 spectrum bins
        CHECK(b.shannon_entropy <= std::log2(65.0) + 1e-12);
    }
}
