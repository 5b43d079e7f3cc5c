#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "abrsim/sim_time.hpp"

namespace abrsim {

// Per-connection SES parameters. Rates in cells/s, durations in ns.
struct SourceParams {
    double pcr_cps = cps_from_mbps(155.52);
    double mcr_cps = 0.0;
    double icr_cps = cps_from_mbps(10.0);
    double rif = 1.0;          // additive increase fraction (AIR)
    double rdf = 1.0 / 512.0;  // consumed by the legacy reduction formulas
    int nrm = 32;
    int mrm = 2;
    SimTime trm_ns = ns_from_ms(100.0);
    double tof = 2.0;
    double tdf = 0.125;  // 0 disables source UILI
    double headroom_cps = cps_from_mbps(10.0);
    SimTime frtt_ns = ns_from_ms(30.0);
    double addf = 2.0;
    std::int64_t tbe = 4096;
    SimTime atdf_ns = ns_from_ms(500.0);
    bool pni = false;
    double delta_cps = 100.0;  // scheduler granularity used in the ACR<=SR test

    // Accepted in configs for completeness; the corresponding SES rules are
    // not modeled (rule 6 cell-count limiting, out-of-rate tagging).
    double crm = 0.0;
    double cdf = 0.5;
    double tcr_cps = 10.0;

    // Decay constant of the time-based reduction: Max(ADDF*FRTT, TBE/PCR).
    SimTime tc_ns() const {
        SimTime a = static_cast<SimTime>(std::llround(addf * static_cast<double>(frtt_ns)));
        SimTime b = ns_from_sec(static_cast<double>(tbe) / pcr_cps);
        return std::max(a, b);
    }

    // Returns an empty string if valid, else a description of the violation.
    std::string validate() const;
};

}  // namespace abrsim
