#ifndef VIBDIAG_WAVELET_HPP
#define VIBDIAG_WAVELET_HPP

#include <span>
#include <string>
#include <vector>

#include "vibdiag/signal.hpp"

// Orthonormal wavelet packet transform with periodic (circular) boundary
// extension. Periodization keeps the per-stage operator orthogonal for any
// even input length, so coefficient counts halve exactly, Parseval holds at
// every level, and the masked inverse reconstructs the input to machine
// precision. Node ordering is natural (Paley): child 2s of node s is its
// low-pass branch, child 2s+1 its high-pass branch.

namespace vibdiag {

/// Analysis filter pair of an orthonormal wavelet. `highpass` is the
/// quadrature mirror of `lowpass`: g[n] = (-1)^n h[L-1-n].
struct WaveletFilterPair {
    std::string name;
    std::vector<double> lowpass;  // h, sums to sqrt(2), unit energy
    std::vector<double> highpass; // g
};

/// Filters by name. Supported: db1 (Haar), db2, db4, db8.
WaveletFilterPair wavelet_filters(const std::string& name);

const std::vector<std::string>& supported_wavelets();

/// Full packet decomposition of one segment: nodes[i][s] holds the
/// coefficients of node s at level i (i = 0 is the input itself).
struct PacketTree {
    int level = 0;                   // k
    std::size_t original_length = 0; // N_o
    std::string wavelet;
    std::vector<std::vector<std::vector<double>>> nodes;

    const std::vector<double>& node(int lvl, std::size_t index) const {
        return nodes.at(static_cast<std::size_t>(lvl)).at(index);
    }
    std::size_t leaf_count() const { return nodes.back().size(); }
    const std::vector<std::vector<double>>& leaves() const { return nodes.back(); }
};

/// Decompose to level k (k >= 1; 2^k must divide the segment length).
PacketTree wpt_decompose(std::span<const double> samples, int level,
                         const WaveletFilterPair& wavelet);
PacketTree wpt_decompose(const SignalSegment& segment, int level,
                         const WaveletFilterPair& wavelet);
PacketTree wpt_decompose(std::span<const double> samples, int level, const std::string& wavelet);
PacketTree wpt_decompose(const SignalSegment& segment, int level, const std::string& wavelet);

/// Inverse packet transform from a complete set of same-length nodes at one
/// level (their count must be a power of two). All-zero nodes are skipped,
/// which makes the masked single-leaf inverse cheap.
std::vector<double> inverse_packet(const std::vector<std::vector<double>>& level_nodes,
                                   const WaveletFilterPair& wavelet);

/// Elementary waveforms: waveform j is the inverse transform with every leaf
/// zeroed except leaf j. Each has original_length samples, and by linearity
/// they sum to the original segment.
std::vector<std::vector<double>> reconstruct_leaves(const PacketTree& tree);

/// Permutation mapping natural (Paley) leaf index to ascending-frequency
/// rank: perm[s] is the frequency position of leaf s. Natural order stays
/// the library-wide default; this is a documented utility.
std::vector<std::size_t> frequency_order_permutation(int level);

} // namespace vibdiag

#endif
