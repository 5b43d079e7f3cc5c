#include "abrsim/policy.hpp"

#include <algorithm>
#include <cmath>

namespace abrsim {

const char* policy_kind_name(PolicyKind k) {
    switch (k) {
        case PolicyKind::None: return "none";
        case PolicyKind::Feb95: return "feb95";
        case PolicyKind::Apr95: return "apr95";
        case PolicyKind::Aug95: return "aug95";
        case PolicyKind::Baseline: return "baseline";
        case PolicyKind::CountBased: return "count_based";
        case PolicyKind::TimeBased: return "time_based";
        case PolicyKind::Joint: return "joint";
        case PolicyKind::Tm40Timeout: return "tm40_timeout";
    }
    return "?";
}

bool policy_kind_from_name(const std::string& name, PolicyKind& out) {
    static const struct { const char* n; PolicyKind k; } table[] = {
        {"none", PolicyKind::None},
        {"feb95", PolicyKind::Feb95},
        {"apr95", PolicyKind::Apr95},
        {"aug95", PolicyKind::Aug95},
        {"baseline", PolicyKind::Baseline},
        {"count_based", PolicyKind::CountBased},
        {"count", PolicyKind::CountBased},
        {"time_based", PolicyKind::TimeBased},
        {"time", PolicyKind::TimeBased},
        {"joint", PolicyKind::Joint},
        {"tm40_timeout", PolicyKind::Tm40Timeout},
        {"tm40", PolicyKind::Tm40Timeout},
    };
    for (const auto& e : table) {
        if (name == e.n) {
            out = e.k;
            return true;
        }
    }
    return false;
}

Region classify_region(double acr, double sr, double headroom, double delta) {
    if (acr > sr + headroom) return Region::A;
    if (std::fabs(acr - sr) <= delta) return Region::C;
    if (acr > sr) return Region::B;
    return Region::D;
}

double reduce_feb95(double acr, double t_legacy, double rdf) {
    double v = acr * (1.0 - t_legacy * acr / rdf);
    return std::max(0.0, v);
}

double reduce_apr95(double acr, double t_legacy, double rdf) {
    return 1.0 / (1.0 / acr + t_legacy / rdf);
}

namespace {

double clamp_rate(double v, const SourceParams& p) {
    return std::clamp(v, p.mcr_cps, p.pcr_cps);
}

}  // namespace

FrmStepResult policy_frm_step(UiliState& st, const SourceParams& p, const PolicyConfig& cfg,
                              double sr_cps, SimTime t_since_frm) {
    FrmStepResult res;
    const double t_s = sec_from_ns(t_since_frm);
    const double t_ms = ms_from_ns(t_since_frm);
    const double tdf = (cfg.kind == PolicyKind::None) ? 0.0 : p.tdf;
    const double before = st.acr;

    st.acr_ok = (st.acr <= sr_cps + p.delta_cps) || (tdf == 0.0);

    switch (cfg.kind) {
        case PolicyKind::None:
        case PolicyKind::CountBased: {
            if (cfg.use_pr5 && st.pr5) {
                st.pr5 = false;  // test disabled exactly once after a normal increase
                break;
            }
            if (st.acr > sr_cps + p.headroom_cps) {
                st.acr = std::max(sr_cps + p.headroom_cps, st.acr * (1.0 - tdf));
            }
            break;
        }
        case PolicyKind::Aug95: {
            // Elapsed time beyond TOF*Nrm cell intervals of (1/ACR).
            if (t_s > p.tof * p.nrm / st.acr && st.acr > p.icr_cps) {
                st.acr = std::max(p.icr_cps, st.acr * (1.0 - t_ms * tdf));
                if (!p.pni) st.ignore_next_increase = true;
            }
            break;
        }
        case PolicyKind::Baseline: {
            // Aug95 with additive headroom (=ICR) and the count-based formula.
            if (st.acr > sr_cps + p.icr_cps) {
                st.acr = std::max(p.icr_cps, st.acr * (1.0 - tdf));
                if (!p.pni) st.ignore_next_increase = true;
            }
            break;
        }
        case PolicyKind::TimeBased: {
            double acr_max = (cfg.time_based_floor == TimeBasedFloor::OptionA)
                                 ? std::max(p.icr_cps, p.tof * sr_cps)
                                 : p.icr_cps + sr_cps;
            if (st.acr > acr_max) {
                double frac = t_s / sec_from_ns(p.tc_ns());
                st.acr = std::max(st.acr * (1.0 - frac), acr_max);
                if (!p.pni) st.ignore_next_increase = true;
            }
            break;
        }
        case PolicyKind::Joint: {
            // Count-based reduction with ICR as the headroom, no hysteresis.
            if (st.acr > sr_cps + p.icr_cps) {
                st.acr = std::max(sr_cps + p.icr_cps, st.acr * (1.0 - tdf));
                if (!p.pni) st.ignore_next_increase = true;
            }
            break;
        }
        case PolicyKind::Feb95: {
            if (t_s > p.tof * p.nrm / st.acr) {
                st.acr = reduce_feb95(st.acr, t_ms, p.rdf);
            }
            break;
        }
        case PolicyKind::Apr95: {
            if (t_s > p.tof * p.nrm / st.acr) {
                st.acr = reduce_apr95(st.acr, t_ms, p.rdf);
            }
            break;
        }
        case PolicyKind::Tm40Timeout:
            break;  // no FRM-time UILI; the ATDF timeout lives in the SES
    }

    st.acr = clamp_rate(st.acr, p);
    res.triggered = st.acr < before;
    return res;
}

bool brm_increase_gate(UiliState& st, const SourceParams& p, const PolicyConfig& cfg, bool ni) {
    switch (cfg.kind) {
        case PolicyKind::None:
        case PolicyKind::CountBased:
            return !ni && st.acr_ok;
        case PolicyKind::Aug95:
        case PolicyKind::Baseline:
        case PolicyKind::TimeBased:
        case PolicyKind::Joint: {
            if (p.pni) return !ni;
            bool blocked = st.ignore_next_increase;
            st.ignore_next_increase = false;  // one shot, consumed by this BRM
            return !ni && !blocked;
        }
        case PolicyKind::Feb95:
        case PolicyKind::Apr95:
        case PolicyKind::Tm40Timeout:
            return !ni;
    }
    return !ni;
}

}  // namespace abrsim
