#pragma once

#include <cstdint>

namespace ftsim {

// Simulated time in integer nanoseconds since simulation start.
// Integer ns represents both 12us serialization times and 10ms delays
// exactly, so event ordering never depends on float rounding.
using SimTime = std::uint64_t;

inline constexpr SimTime kNanosecond = 1;
inline constexpr SimTime kMicrosecond = 1000;
inline constexpr SimTime kMillisecond = 1000 * kMicrosecond;
inline constexpr SimTime kSecond = 1000 * kMillisecond;

inline constexpr double to_seconds(SimTime t) {
    return static_cast<double>(t) / 1e9;
}

}  // namespace ftsim
