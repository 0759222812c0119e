#pragma once

#include <cstdio>
#include <span>
#include <string>

namespace tripatch {

/// Pairwise (cascade) summation. Bounds the rounding error to O(log n) ulps
/// and is independent of any threading, so reductions stay reproducible.
double pairwise_sum(std::span<const double> values);

/// Fixed 17-significant-digit decimal formatting. Round-trips any double and
/// gives byte-identical serialized artifacts across platforms and runs.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace tripatch
