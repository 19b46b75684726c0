#ifndef VIBDIAG_CLI_HPP
#define VIBDIAG_CLI_HPP

namespace vibdiag {

/// Full command-line surface (synth / extract / select-wavelet / train /
/// evaluate / predict / bench). Returns the process exit status:
/// 0 success, 1 usage error, 2 data error, 3 invariant violation.
int run_cli(int argc, const char* const* argv);

} // namespace vibdiag

#endif
