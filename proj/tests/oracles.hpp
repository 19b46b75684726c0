#ifndef VIBDIAG_TESTS_ORACLES_HPP
#define VIBDIAG_TESTS_ORACLES_HPP

// Slow reference implementations the tests check the library against.
// Everything here is written from the defining formulas with none of the
// library's fast paths (no FFT, no in-place filter bank), so agreement is
// meaningful evidence rather than the same code run twice.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vibdiag/detail/rng.hpp"
#include "vibdiag/wavelet.hpp"

namespace oracle {

// --- reference spectrum ------------------------------------------------------

// O(N^2) DFT, long-double accumulation, one-sided amplitude normalization
// (2/N interior, 1/N at DC and at Nyquist for even N).
inline std::vector<double> naive_amplitude_spectrum(std::span<const double> x) {
    const std::size_t n = x.size();
    const std::size_t bins = n / 2 + 1;
    const long double two_pi = 6.283185307179586476925286766559005768L;
    std::vector<double> amps(bins);
    for (std::size_t j = 0; j < bins; ++j) {
        long double re = 0.0L, im = 0.0L;
        for (std::size_t t = 0; t < n; ++t) {
            const long double ph =
                two_pi * static_cast<long double>(j) * static_cast<long double>(t) /
                static_cast<long double>(n);
            re += static_cast<long double>(x[t]) * std::cos(ph);
            im -= static_cast<long double>(x[t]) * std::sin(ph);
        }
        const bool edge = j == 0 || (n % 2 == 0 && j == n / 2);
        const long double scale = (edge ? 1.0L : 2.0L) / static_cast<long double>(n);
        amps[j] = static_cast<double>(scale * std::sqrt(re * re + im * im));
    }
    return amps;
}

// --- reference wavelet packet transform --------------------------------------

using Matrix = std::vector<std::vector<double>>;

// One periodized analysis stage as an explicit (n/2) x n matrix:
// M[t][(2t - k) mod n] += f[k].
inline Matrix stage_matrix(const std::vector<double>& f, std::size_t n) {
    Matrix m(n / 2, std::vector<double>(n, 0.0));
    for (std::size_t t = 0; t < n / 2; ++t)
        for (std::size_t k = 0; k < f.size(); ++k) {
            const std::size_t col = (2 * t + n * f.size() - k) % n;
            m[t][col] += f[k];
        }
    return m;
}

inline std::vector<double> matvec(const Matrix& m, std::span<const double> x) {
    std::vector<double> y(m.size(), 0.0);
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < x.size(); ++c) y[r] += m[r][c] * x[c];
    return y;
}

// Level-k node coefficients (natural order) by repeated dense-matrix stages.
inline Matrix matrix_wpt(std::span<const double> x, const vibdiag::WaveletFilterPair& w,
                         int level) {
    Matrix nodes{std::vector<double>(x.begin(), x.end())};
    for (int i = 0; i < level; ++i) {
        Matrix next;
        for (const auto& node : nodes) {
            const Matrix lo = stage_matrix(w.lowpass, node.size());
            const Matrix hi = stage_matrix(w.highpass, node.size());
            next.push_back(matvec(lo, node));
            next.push_back(matvec(hi, node));
        }
        nodes = std::move(next);
    }
    return nodes;
}

// Largest deviation of [lo; hi] stacked stage rows from orthonormality; a
// self-check that the reference construction itself is sound.
inline double stage_orthonormality_error(const vibdiag::WaveletFilterPair& w, std::size_t n) {
    Matrix m = stage_matrix(w.lowpass, n);
    const Matrix hi = stage_matrix(w.highpass, n);
    m.insert(m.end(), hi.begin(), hi.end());
    double worst = 0.0;
    for (std::size_t a = 0; a < m.size(); ++a)
        for (std::size_t b = 0; b < m.size(); ++b) {
            double dot = 0.0;
            for (std::size_t c = 0; c < n; ++c) dot += m[a][c] * m[b][c];
            worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
        }
    return worst;
}

// --- helpers -----------------------------------------------------------------

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
    vibdiag::detail::SplitMix64 rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = 2.0 * vibdiag::detail::next_unit(rng) - 1.0;
    return v;
}

inline double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// max |a-b| / max(1, max|a|): a relative error that stays sane near zero.
inline double rel_err(std::span<const double> want, std::span<const double> got) {
    return max_abs_diff(want, got) / std::max(1.0, max_abs(want));
}

// Scratch directory under the system temp root, wiped on entry and exit.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / ("vibdiag_tests_" + name)) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace oracle

#endif
