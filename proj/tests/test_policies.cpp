#include <doctest.h>

#include <cmath>
#include <random>

#include "abrsim/policy.hpp"

using namespace abrsim;
using doctest::Approx;

namespace {

SourceParams worked_example_params() {
    // The rounded five-source figures used throughout the formula examples.
    SourceParams p;
    p.pcr_cps = 366792.0;
    p.mcr_cps = 0.0;
    p.icr_cps = 2359.0;
    p.nrm = 32;
    p.tof = 2.0;
    p.tdf = 0.125;
    p.headroom_cps = 2359.0;
    p.frtt_ns = ns_from_ms(30.0);
    p.addf = 2.0;
    p.tbe = 512;
    p.delta_cps = 100.0;
    return p;
}

}  // namespace

TEST_CASE("region classification follows the four-region map") {
    CHECK(classify_region(66038, 23585, 2359, 100) == Region::A);
    CHECK(classify_region(25000, 23585, 2359, 100) == Region::B);
    CHECK(classify_region(20000, 23585, 2359, 100) == Region::D);
    CHECK(classify_region(23600, 23585, 2359, 100) == Region::C);  // within delta
    CHECK(classify_region(23500, 23585, 2359, 100) == Region::C);  // delta softens C/D
}

TEST_CASE("feb95 reduction") {
    CHECK(reduce_feb95(100.0, 0.0, 0.5) == 100.0);
    CHECK(reduce_feb95(100.0, 0.001, 0.5) == Approx(80.0).epsilon(1e-12));
    CHECK(reduce_feb95(100.0, 1.0, 0.5) == 0.0);  // formula goes negative, floored
}

TEST_CASE("apr95 harmonic reduction") {
    CHECK(reduce_apr95(100.0, 0.0, 1.0) == 100.0);
    CHECK(reduce_apr95(100.0, 0.01, 1.0) == Approx(50.0).epsilon(1e-12));
    double prev = reduce_apr95(100.0, 0.001, 1.0);
    for (double t = 0.002; t < 0.1; t += 0.002) {
        double v = reduce_apr95(100.0, t, 1.0);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("count-based step: detection, reduction, floor") {
    SourceParams p = worked_example_params();
    PolicyConfig cfg;
    cfg.kind = PolicyKind::CountBased;

    UiliState st;
    st.acr = 66038.0;
    auto res = policy_frm_step(st, p, cfg, 23585.0, ns_from_ms(1.357));
    CHECK(res.triggered);
    CHECK(st.acr == Approx(57783.25).epsilon(1e-9));
    CHECK_FALSE(st.acr_ok);  // 66038 > 23585 + delta before the reduction

    SUBCASE("region B leaves ACR untouched") {
        UiliState b;
        b.acr = 25000.0;
        auto r = policy_frm_step(b, p, cfg, 23585.0, ns_from_ms(1.357));
        CHECK_FALSE(r.triggered);
        CHECK(b.acr == 25000.0);
    }
    SUBCASE("floor never goes below SR + headroom") {
        UiliState f;
        f.acr = 26000.0;
        policy_frm_step(f, p, cfg, 23585.0, ns_from_ms(1.357));
        CHECK(f.acr == Approx(23585.0 + 2359.0).epsilon(1e-12));
    }
    SUBCASE("headroom equal to ICR keeps the floor at ICR as SR vanishes") {
        SourceParams q = p;
        q.headroom_cps = q.icr_cps;
        UiliState f;
        f.acr = 66038.0;
        for (int i = 0; i < 64; ++i) policy_frm_step(f, q, cfg, 1e-6, ns_from_ms(10.0));
        CHECK(f.acr == Approx(q.icr_cps).epsilon(1e-6));
    }
}

TEST_CASE("count-based seven-trigger convergence sequence") {
    SourceParams p = worked_example_params();
    PolicyConfig cfg;
    cfg.kind = PolicyKind::CountBased;
    UiliState st;
    st.acr = 66038.0;
    const double expect[] = {57783.25,          50560.34375,       44240.30078125,
                             38710.2631835938,  33871.4802856445,  29637.5452499390,
                             25944.0};
    for (int i = 0; i < 7; ++i) {
        auto r = policy_frm_step(st, p, cfg, 23585.0, ns_from_ms(1.357));
        CHECK(r.triggered);
        CHECK(st.acr == Approx(expect[i]).epsilon(1e-9));
    }
    auto r = policy_frm_step(st, p, cfg, 23585.0, ns_from_ms(1.357));
    CHECK_FALSE(r.triggered);  // at the floor: detection is off
    CHECK(st.acr == Approx(25944.0).epsilon(1e-12));
}

TEST_CASE("count-based PR5 skips exactly one test") {
    SourceParams p = worked_example_params();
    PolicyConfig cfg;
    cfg.kind = PolicyKind::CountBased;
    cfg.use_pr5 = true;
    UiliState st;
    st.acr = 66038.0;
    st.pr5 = true;
    auto r = policy_frm_step(st, p, cfg, 23585.0, ns_from_ms(1.357));
    CHECK_FALSE(r.triggered);
    CHECK(st.acr == 66038.0);
    CHECK_FALSE(st.pr5);
    r = policy_frm_step(st, p, cfg, 23585.0, ns_from_ms(1.357));
    CHECK(r.triggered);
}

TEST_CASE("TDF=0 disables the reduction and forces acr_ok") {
    SourceParams p = worked_example_params();
    p.tdf = 0.0;
    PolicyConfig cfg;
    cfg.kind = PolicyKind::CountBased;
    UiliState st;
    st.acr = 66038.0;
    auto r = policy_frm_step(st, p, cfg, 23585.0, ns_from_ms(1.357));
    CHECK_FALSE(r.triggered);
    CHECK(st.acr == 66038.0);
    CHECK(st.acr_ok);
}

TEST_CASE("none behaves identically to count_based with TDF=0") {
    SourceParams p = worked_example_params();
    SourceParams p0 = p;
    p0.tdf = 0.0;
    PolicyConfig none{PolicyKind::None};
    PolicyConfig count{PolicyKind::CountBased};
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> acr(100.0, 366792.0);
    std::uniform_real_distribution<double> sr(1.0, 366792.0);
    for (int i = 0; i < 200; ++i) {
        UiliState a, b;
        a.acr = b.acr = acr(rng);
        double s = sr(rng);
        policy_frm_step(a, p, none, s, ns_from_ms(1.0));
        policy_frm_step(b, p0, count, s, ns_from_ms(1.0));
        CHECK(a.acr == b.acr);
        CHECK(a.acr_ok == b.acr_ok);
    }
}

TEST_CASE("aug95 step: temporal trigger, per-ms decrease, ICR floor, rule 5b") {
    SourceParams p = worked_example_params();
    PolicyConfig cfg;
    cfg.kind = PolicyKind::Aug95;

    UiliState st;
    st.acr = 66038.0;
    // Threshold is TOF*Nrm/ACR ~ 0.969 ms; a 3.2 ms window triggers.
    auto r = policy_frm_step(st, p, cfg, 10000.0, ns_from_ms(3.2));
    CHECK(r.triggered);
    CHECK(st.acr == Approx(66038.0 * (1.0 - 3.2 * 0.125)).epsilon(1e-9));
    CHECK(st.ignore_next_increase);

    SUBCASE("below the threshold nothing happens") {
        UiliState q;
        q.acr = 66038.0;
        auto r2 = policy_frm_step(q, p, cfg, 10000.0, ns_from_ms(0.9));
        CHECK_FALSE(r2.triggered);
    }
    SUBCASE("ACR at ICR never triggers") {
        UiliState q;
        q.acr = p.icr_cps;
        auto r2 = policy_frm_step(q, p, cfg, 10.0, ns_from_ms(50.0));
        CHECK_FALSE(r2.triggered);
    }
    SUBCASE("large T floors at ICR") {
        UiliState q;
        q.acr = 66038.0;
        policy_frm_step(q, p, cfg, 10.0, ns_from_ms(50.0));
        CHECK(q.acr == p.icr_cps);
    }
    SUBCASE("PNI=1 turns rule 5b off") {
        SourceParams q = p;
        q.pni = true;
        UiliState s2;
        s2.acr = 66038.0;
        auto r2 = policy_frm_step(s2, q, cfg, 10000.0, ns_from_ms(3.2));
        CHECK(r2.triggered);
        CHECK_FALSE(s2.ignore_next_increase);
    }
}

TEST_CASE("baseline step: additive detection, count-based formula, ICR floor") {
    SourceParams p = worked_example_params();
    PolicyConfig cfg;
    cfg.kind = PolicyKind::Baseline;
    UiliState st;
    st.acr = 66038.0;
    auto r = policy_frm_step(st, p, cfg, 23585.0, ns_from_ms(1.357));
    CHECK(r.triggered);
    CHECK(st.acr == Approx(57783.25).epsilon(1e-9));  // max(ICR, 66038*0.875)
    CHECK(st.ignore_next_increase);
    // The floor is ICR, not SR+ICR: iterating undershoots the source rate.
    for (int i = 0; i < 64; ++i) policy_frm_step(st, p, cfg, 23585.0, ns_from_ms(1.357));
    CHECK(st.acr < 23585.0 + p.icr_cps);
    CHECK(st.acr >= p.icr_cps);
}

TEST_CASE("time-based step: Tc, decay, both floors, total-decay clamp") {
    SourceParams p = worked_example_params();
    p.pcr_cps = 366792.0;
    CHECK(p.tc_ns() == ns_from_ms(60.0));  // max(2*30ms, 512/366792 s)

    PolicyConfig cfg;
    cfg.kind = PolicyKind::TimeBased;
    cfg.time_based_floor = TimeBasedFloor::OptionA;

    UiliState st;
    st.acr = 66038.0;
    auto r = policy_frm_step(st, p, cfg, 23585.0, ns_from_ms(10.0));
    CHECK(r.triggered);
    CHECK(st.acr == Approx(66038.0 * (1.0 - 10.0 / 60.0)).epsilon(1e-9));
    CHECK(st.ignore_next_increase);

    SUBCASE("T beyond Tc clamps to the floor") {
        UiliState q;
        q.acr = 66038.0;
        policy_frm_step(q, p, cfg, 23585.0, ns_from_ms(120.0));
        CHECK(q.acr == Approx(std::max(p.icr_cps, 2.0 * 23585.0)).epsilon(1e-12));
    }
    SUBCASE("option b floors at ICR + SR") {
        PolicyConfig b = cfg;
        b.time_based_floor = TimeBasedFloor::OptionB;
        UiliState q;
        q.acr = 66038.0;
        policy_frm_step(q, p, b, 23585.0, ns_from_ms(120.0));
        CHECK(q.acr == Approx(p.icr_cps + 23585.0).epsilon(1e-12));
    }
    SUBCASE("result is non-increasing in T and never below the floor") {
        double prev = 66038.0;
        for (double t_ms = 1.0; t_ms <= 150.0; t_ms += 1.0) {
            UiliState q;
            q.acr = 66038.0;
            policy_frm_step(q, p, cfg, 23585.0, ns_from_ms(t_ms));
            CHECK(q.acr <= prev + 1e-9);
            CHECK(q.acr >= std::max(p.icr_cps, 2.0 * 23585.0) - 1e-9);
            prev = q.acr;
        }
    }
}

TEST_CASE("joint step: ICR headroom, small TDF, one-shot rule 5b") {
    SourceParams p = worked_example_params();
    p.tdf = 1.0 / 16.0;
    PolicyConfig cfg;
    cfg.kind = PolicyKind::Joint;
    UiliState st;
    st.acr = 66038.0;
    auto r = policy_frm_step(st, p, cfg, 23585.0, ns_from_ms(1.357));
    CHECK(r.triggered);
    CHECK(st.acr == Approx(61910.625).epsilon(1e-9));  // max(25944, 66038*15/16)
    CHECK(st.ignore_next_increase);

    // One ignored BRM, then increases flow again.
    CHECK_FALSE(brm_increase_gate(st, p, cfg, false));
    CHECK(brm_increase_gate(st, p, cfg, false));

    SUBCASE("PNI disables the ignored BRM") {
        SourceParams q = p;
        q.pni = true;
        UiliState s2;
        s2.acr = 66038.0;
        policy_frm_step(s2, q, cfg, 23585.0, ns_from_ms(1.357));
        CHECK_FALSE(s2.ignore_next_increase);
        CHECK(brm_increase_gate(s2, q, cfg, false));
    }
}

TEST_CASE("BRM gate per variant") {
    SourceParams p = worked_example_params();

    SUBCASE("count-based gates on acr_ok (region B blocks increases)") {
        PolicyConfig cfg{PolicyKind::CountBased};
        UiliState st;
        st.acr_ok = false;
        CHECK_FALSE(brm_increase_gate(st, p, cfg, false));
        st.acr_ok = true;
        CHECK(brm_increase_gate(st, p, cfg, false));
    }
    SUBCASE("rule-5b variants ignore exactly the next BRM") {
        for (PolicyKind k : {PolicyKind::Aug95, PolicyKind::Baseline, PolicyKind::TimeBased,
                             PolicyKind::Joint}) {
            PolicyConfig cfg{k};
            UiliState st;
            st.ignore_next_increase = true;
            CHECK_FALSE(brm_increase_gate(st, p, cfg, false));
            CHECK(brm_increase_gate(st, p, cfg, false));
        }
    }
    SUBCASE("NI=1 blocks every variant") {
        for (PolicyKind k : {PolicyKind::None, PolicyKind::Feb95, PolicyKind::Apr95,
                             PolicyKind::Aug95, PolicyKind::Baseline, PolicyKind::CountBased,
                             PolicyKind::TimeBased, PolicyKind::Joint, PolicyKind::Tm40Timeout}) {
            PolicyConfig cfg{k};
            UiliState st;
            CHECK_FALSE(brm_increase_gate(st, p, cfg, true));
        }
    }
}

TEST_CASE("count-based reduction is a contraction toward the floor") {
    SourceParams p = worked_example_params();
    PolicyConfig cfg{PolicyKind::CountBased};
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        double sr = 1.0 + u(rng) * 300000.0;
        double headroom = 1.0 + u(rng) * 50000.0;
        double acr0 = std::min(366792.0, sr + headroom + u(rng) * 200000.0 + 1.0);
        SourceParams q = p;
        q.headroom_cps = headroom;
        q.tdf = 0.01 + u(rng) * 0.98;
        UiliState st;
        st.acr = acr0;
        policy_frm_step(st, q, cfg, sr, ns_from_ms(1.0));
        double floor = std::min(sr + headroom, q.pcr_cps);
        CHECK(st.acr >= floor - 1e-9);
        CHECK(st.acr <= acr0 + 1e-12);
    }
}

TEST_CASE("region-B absorption: no increase until the allocation is used") {
    SourceParams p = worked_example_params();
    PolicyConfig cfg{PolicyKind::CountBased};
    UiliState st;
    st.acr = 66038.0;
    const double sr = 23585.0;
    // Drive to the floor, then alternate FRM steps and gate queries.
    for (int i = 0; i < 16; ++i) policy_frm_step(st, p, cfg, sr, ns_from_ms(1.357));
    CHECK(st.acr == Approx(25944.0));
    for (int i = 0; i < 32; ++i) {
        CHECK_FALSE(brm_increase_gate(st, p, cfg, false));  // hysteresis holds
        double before = st.acr;
        policy_frm_step(st, p, cfg, sr, ns_from_ms(1.357));
        CHECK(st.acr == before);
    }
    // Once the source uses the allocation (SR rises to ACR), the gate opens.
    policy_frm_step(st, p, cfg, st.acr, ns_from_ms(1.357));
    CHECK(brm_increase_gate(st, p, cfg, false));
}

TEST_CASE("joint re-rises after one ignored BRM where count-based stays put") {
    SourceParams p = worked_example_params();
    p.tdf = 1.0 / 16.0;
    const double sr = 23585.0;
    const double er = 66038.0;

    auto brm = [&](UiliState& st, const PolicyConfig& cfg) {
        if (brm_increase_gate(st, p, cfg, false)) {
            st.acr = std::min(st.acr + p.pcr_cps, p.pcr_cps);
        }
        st.acr = std::min(st.acr, er);
    };

    PolicyConfig joint{PolicyKind::Joint};
    PolicyConfig count{PolicyKind::CountBased};
    UiliState js, cs;
    js.acr = cs.acr = 66038.0;
    // Converge both to their floors.
    for (int i = 0; i < 64; ++i) {
        policy_frm_step(js, p, joint, sr, ns_from_ms(1.357));
        policy_frm_step(cs, p, count, sr, ns_from_ms(1.357));
    }
    CHECK(js.acr == Approx(25944.0));
    CHECK(cs.acr == Approx(25944.0));
    // A stream of increase-requesting BRMs: joint ignores one, then climbs.
    brm(js, joint);
    brm(cs, count);
    CHECK(js.acr == Approx(25944.0));  // rule 5b ate the first one
    brm(js, joint);
    brm(cs, count);
    CHECK(js.acr == Approx(er));  // re-entered the retention zone
    CHECK(cs.acr == Approx(25944.0));
}

TEST_CASE("all reductions clamp into [MCR, PCR]") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (PolicyKind k : {PolicyKind::Feb95, PolicyKind::Apr95, PolicyKind::Aug95,
                         PolicyKind::Baseline, PolicyKind::CountBased, PolicyKind::TimeBased,
                         PolicyKind::Joint}) {
        PolicyConfig cfg{k};
        for (int i = 0; i < 200; ++i) {
            SourceParams p = worked_example_params();
            p.mcr_cps = u(rng) * 1000.0;
            p.icr_cps = p.mcr_cps + 1.0 + u(rng) * 5000.0;
            p.tdf = u(rng);
            UiliState st;
            st.acr = p.icr_cps + u(rng) * (p.pcr_cps - p.icr_cps);
            policy_frm_step(st, p, cfg, u(rng) * 400000.0, ns_from_ms(0.1 + u(rng) * 200.0));
            CHECK(st.acr >= p.mcr_cps - 1e-9);
            CHECK(st.acr <= p.pcr_cps + 1e-9);
        }
    }
}
