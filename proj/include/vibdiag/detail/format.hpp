#ifndef VIBDIAG_DETAIL_FORMAT_HPP
#define VIBDIAG_DETAIL_FORMAT_HPP

#include <cstdio>
#include <string>

namespace vibdiag::detail {

/// Shortest-of-17-significant-digits rendering: every finite double written
/// this way parses back to the identical bit pattern, which the file-format
/// round-trip contract depends on.
inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace vibdiag::detail

#endif
