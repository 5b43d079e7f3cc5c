#pragma once

#include <cmath>
#include <cstdint>

namespace abrsim {

// Simulation clock: integer nanoseconds. One cell time at 155.52 Mbps is
// ~2726 ns, so ns resolution keeps all scheduling arithmetic exact.
using SimTime = std::int64_t;

constexpr SimTime kNsPerUs = 1'000;
constexpr SimTime kNsPerMs = 1'000'000;
constexpr SimTime kNsPerSec = 1'000'000'000;

// 53-byte ATM cell.
constexpr double kCellBits = 424.0;

inline SimTime ns_from_ms(double v) { return static_cast<SimTime>(std::llround(v * kNsPerMs)); }
inline SimTime ns_from_us(double v) { return static_cast<SimTime>(std::llround(v * kNsPerUs)); }
inline SimTime ns_from_sec(double v) { return static_cast<SimTime>(std::llround(v * kNsPerSec)); }

inline double sec_from_ns(SimTime t) { return static_cast<double>(t) * 1e-9; }
inline double ms_from_ns(SimTime t) { return static_cast<double>(t) * 1e-6; }

// Rates are carried in cells/s; configs speak Mbps.
inline double cps_from_mbps(double mbps) { return mbps * 1e6 / kCellBits; }
inline double mbps_from_cps(double cps) { return cps * kCellBits / 1e6; }

// Inter-cell gap at a given rate, floored at 1 ns.
inline SimTime cell_gap_ns(double rate_cps) {
    SimTime g = static_cast<SimTime>(std::llround(1e9 / rate_cps));
    return g > 0 ? g : 1;
}

// Propagation delay: 5 us per km, exact.
inline SimTime prop_delay_ns(double length_km) {
    return static_cast<SimTime>(std::llround(length_km * 5000.0));
}

}  // namespace abrsim
