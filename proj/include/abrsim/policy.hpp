#pragma once

#include <string>

#include "abrsim/sim_time.hpp"
#include "abrsim/source_params.hpp"

namespace abrsim {

// The UILI policy catalog. "none" is count_based with TDF forced to zero,
// which makes the no-op behavior hold by construction.
enum class PolicyKind {
    None,
    Feb95,
    Apr95,
    Aug95,
    Baseline,
    CountBased,
    TimeBased,
    Joint,
    Tm40Timeout,
};

enum class TimeBasedFloor { OptionA, OptionB };

struct PolicyConfig {
    PolicyKind kind = PolicyKind::CountBased;
    TimeBasedFloor time_based_floor = TimeBasedFloor::OptionA;
    bool use_pr5 = false;
    bool switch_aging_enabled = false;  // consumed by the switch fabric
    double aging_alpha = 1.0;
    double aging_delta = 1.0;

    // The TM 4.0 source timeout applies to the timeout-only policy and to the
    // source half of the switch-based scheme.
    bool has_source_timeout() const {
        return kind == PolicyKind::Tm40Timeout || switch_aging_enabled;
    }

    // Variants that ignore the next increase feedback after a reduction.
    bool uses_rule5b() const {
        return kind == PolicyKind::Aug95 || kind == PolicyKind::Baseline ||
               kind == PolicyKind::TimeBased || kind == PolicyKind::Joint;
    }
};

const char* policy_kind_name(PolicyKind k);
bool policy_kind_from_name(const std::string& name, PolicyKind& out);

// Operating regions relative to the measured source rate.
//   A: acr > sr + headroom (ACR retention)   B: sr < acr <= sr + headroom
//   C: acr == sr within delta                D: acr < sr
enum class Region : char { A = 'A', B = 'B', C = 'C', D = 'D' };

Region classify_region(double acr, double sr, double headroom, double delta);

// Legacy reduction formulas. T is in the legacy time unit (milliseconds).
double reduce_feb95(double acr, double t_legacy, double rdf);
double reduce_apr95(double acr, double t_legacy, double rdf);

// Per-VC UILI state carried by the SES.
struct UiliState {
    double acr = 0.0;
    bool acr_ok = true;
    bool pr5 = false;
    bool ignore_next_increase = false;
};

struct FrmStepResult {
    bool triggered = false;  // a reduction was applied
};

// Detection + reduction at an FRM send. sr is the freshly measured source
// rate, t_since_frm the length of the measurement window. Recomputes acr_ok
// against the pre-reduction ACR and clamps the result into [MCR, PCR].
FrmStepResult policy_frm_step(UiliState& st, const SourceParams& p, const PolicyConfig& cfg,
                              double sr_cps, SimTime t_since_frm);

// Gate in front of the BRM increase branch. Consumes the one-shot rule-5b
// flag. Decreases are never gated.
bool brm_increase_gate(UiliState& st, const SourceParams& p, const PolicyConfig& cfg, bool ni);

}  // namespace abrsim
