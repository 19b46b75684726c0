#include "vibdiag/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vibdiag/errors.hpp"

namespace vibdiag {

namespace {

// Extremal-phase Daubechies analysis low-pass filters, descending ("textbook")
// tap order, derived by spectral factorization at 60-digit precision and
// rounded to the nearest double. Each satisfies sum h = sqrt(2) and
// sum h^2 = 1 to machine precision.
const std::vector<double> kDb1 = {
    0.70710678118654752, 0.70710678118654752};

const std::vector<double> kDb2 = {
    0.48296291314453414, 0.83651630373780791,
    0.22414386804201338, -0.12940952255126038};

const std::vector<double> kDb4 = {
    0.2303778133088965,   0.71484657055291565,
    0.63088076792985891,  -0.027983769416859854,
    -0.18703481171909308, 0.030841381835560764,
    0.0328830116668852,   -0.010597401785069032};

const std::vector<double> kDb8 = {
    0.05441584224310401,     0.31287159091429997,
    0.67563073629728981,     0.58535468365420671,
    -0.015829105256349306,   -0.28401554296154693,
    0.00047248457391328277,  0.12874742662047846,
    -0.017369301001807546,   -0.044088253930794752,
    0.013981027917398282,    0.0087460940474057767,
    -0.0048703529934515743,  -0.00039174037337694705,
    0.00067544940645056937,  -0.00011747678412476953};

std::vector<double> quadrature_mirror(const std::vector<double>& h) {
    const std::size_t len = h.size();
    std::vector<double> g(len);
    for (std::size_t n = 0; n < len; ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        g[n] = sign * h[len - 1 - n];
    }
    return g;
}

// One analysis stage: out[t] = sum_k f[k] x[(2t - k) mod n], n even.
void analyze_into(std::span<const double> x, const std::vector<double>& f,
                  std::vector<double>& out) {
    const std::size_t n = x.size();
    const std::size_t half = n / 2;
    out.assign(half, 0.0);
    for (std::size_t t = 0; t < half; ++t) {
        double acc = 0.0;
        std::size_t j = 2 * t;
        for (const double c : f) {
            acc += c * x[j];
            j = (j == 0) ? n - 1 : j - 1;
        }
        out[t] = acc;
    }
}

// Adjoint of analyze_into: x[(2t - k) mod n] += a[t] f[k]. With orthonormal
// filters the adjoint is the exact inverse of the combined two-channel stage.
void synthesize_add(const std::vector<double>& a, const std::vector<double>& f,
                    std::vector<double>& x) {
    const std::size_t n = x.size();
    for (std::size_t t = 0; t < a.size(); ++t) {
        const double v = a[t];
        if (v == 0.0) {
            continue;
        }
        std::size_t j = 2 * t;
        for (const double c : f) {
            x[j] += v * c;
            j = (j == 0) ? n - 1 : j - 1;
        }
    }
}

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

} // namespace

const std::vector<std::string>& supported_wavelets() {
    static const std::vector<std::string> names = {"db1", "db2", "db4", "db8"};
    return names;
}

WaveletFilterPair wavelet_filters(const std::string& name) {
    const std::vector<double>* h = nullptr;
    if (name == "db1" || name == "haar") {
        h = &kDb1;
    } else if (name == "db2") {
        h = &kDb2;
    } else if (name == "db4") {
        h = &kDb4;
    } else if (name == "db8") {
        h = &kDb8;
    }
    if (h == nullptr) {
        std::ostringstream msg;
        msg << "unknown wavelet '" << name << "'; supported:";
        for (const auto& w : supported_wavelets()) {
            msg << " " << w;
        }
        throw InvariantError(msg.str());
    }
    return WaveletFilterPair{name == "haar" ? "db1" : name, *h, quadrature_mirror(*h)};
}

PacketTree wpt_decompose(std::span<const double> samples, int level,
                         const WaveletFilterPair& wavelet) {
    if (level < 1) {
        throw InvariantError("wpt_decompose: level must be >= 1");
    }
    if (samples.empty()) {
        throw InvariantError("wpt_decompose: empty segment");
    }
    const std::size_t block = std::size_t{1} << level;
    if (samples.size() % block != 0) {
        std::ostringstream msg;
        msg << "wpt_decompose: segment length " << samples.size()
            << " is not divisible by 2^" << level << " = " << block;
        throw InvariantError(msg.str());
    }

    PacketTree tree;
    tree.level = level;
    tree.original_length = samples.size();
    tree.wavelet = wavelet.name;
    tree.nodes.resize(static_cast<std::size_t>(level) + 1);
    tree.nodes[0].push_back(std::vector<double>(samples.begin(), samples.end()));

    for (int i = 0; i < level; ++i) {
        const auto& parents = tree.nodes[static_cast<std::size_t>(i)];
        auto& children = tree.nodes[static_cast<std::size_t>(i) + 1];
        children.resize(parents.size() * 2);
        for (std::size_t s = 0; s < parents.size(); ++s) {
            analyze_into(parents[s], wavelet.lowpass, children[2 * s]);
            analyze_into(parents[s], wavelet.highpass, children[2 * s + 1]);
        }
    }
    return tree;
}

PacketTree wpt_decompose(const SignalSegment& segment, int level,
                         const WaveletFilterPair& wavelet) {
    return wpt_decompose(std::span<const double>(segment.samples), level, wavelet);
}

PacketTree wpt_decompose(std::span<const double> samples, int level, const std::string& wavelet) {
    return wpt_decompose(samples, level, wavelet_filters(wavelet));
}

PacketTree wpt_decompose(const SignalSegment& segment, int level, const std::string& wavelet) {
    return wpt_decompose(std::span<const double>(segment.samples), level, wavelet_filters(wavelet));
}

std::vector<double> inverse_packet(const std::vector<std::vector<double>>& level_nodes,
                                   const WaveletFilterPair& wavelet) {
    if (level_nodes.empty() || !is_power_of_two(level_nodes.size())) {
        throw InvariantError("inverse_packet: node count must be a power of two");
    }
    const std::size_t len = level_nodes.front().size();
    for (const auto& node : level_nodes) {
        if (node.size() != len) {
            throw InvariantError("inverse_packet: nodes must share one length");
        }
    }
    if (len == 0) {
        throw InvariantError("inverse_packet: empty nodes");
    }

    std::vector<std::vector<double>> current = level_nodes;
    while (current.size() > 1) {
        std::vector<std::vector<double>> parents(current.size() / 2);
        for (std::size_t s = 0; s < parents.size(); ++s) {
            parents[s].assign(current[2 * s].size() * 2, 0.0);
            synthesize_add(current[2 * s], wavelet.lowpass, parents[s]);
            synthesize_add(current[2 * s + 1], wavelet.highpass, parents[s]);
        }
        current = std::move(parents);
    }
    return std::move(current.front());
}

std::vector<std::vector<double>> reconstruct_leaves(const PacketTree& tree) {
    if (tree.nodes.empty() || tree.nodes.size() != static_cast<std::size_t>(tree.level) + 1) {
        throw InvariantError("reconstruct_leaves: tree is not complete to its level");
    }
    const auto wavelet = wavelet_filters(tree.wavelet);
    const auto& leaves = tree.leaves();

    std::vector<std::vector<double>> waveforms;
    waveforms.reserve(leaves.size());
    std::vector<std::vector<double>> masked(leaves.size());
    for (auto& node : masked) {
        node.assign(leaves.front().size(), 0.0);
    }
    for (std::size_t j = 0; j < leaves.size(); ++j) {
        masked[j] = leaves[j];
        waveforms.push_back(inverse_packet(masked, wavelet));
        masked[j].assign(leaves[j].size(), 0.0);
    }
    return waveforms;
}

std::vector<std::size_t> frequency_order_permutation(int level) {
    if (level < 0 || level > 62) {
        throw InvariantError("frequency_order_permutation: level out of range");
    }
    const std::size_t count = std::size_t{1} << level;
    std::vector<std::size_t> perm(count);
    for (std::size_t s = 0; s < count; ++s) {
        // Walk the path from the root; a high-pass branch mirrors the
        // frequency axis of everything below it (Gray-code decode).
        std::size_t freq = 0;
        std::size_t carry = 0;
        for (int bit = level - 1; bit >= 0; --bit) {
            const std::size_t d = (s >> bit) & 1u;
            carry ^= d;
            freq = (freq << 1) | carry;
        }
        perm[s] = freq;
    }
    return perm;
}

} // namespace vibdiag
