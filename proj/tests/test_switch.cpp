#include <doctest.h>

#include <cmath>
#include <vector>

#include "abrsim/switch_fabric.hpp"

using namespace abrsim;
using doctest::Approx;

namespace {

struct CaptureSink : CellSink {
    std::vector<std::pair<Cell, SimTime>> cells;
    void deliver(const Cell& c, SimTime t) override { cells.emplace_back(c, t); }
};

}  // namespace

TEST_CASE("link parameters derive exactly") {
    LinkParams link{cps_from_mbps(155.52), 1000.0};
    CHECK(link.prop_ns() == 5'000'000);
    CHECK(link.service_ns() == 2726);
    LinkParams half{cps_from_mbps(155.52), 500.0};
    CHECK(half.prop_ns() == 2'500'000);
}

TEST_CASE("idle port serves at now + 1/rate; busy port chains FIFO") {
    Simulator sim;
    TraceSink trace;
    CaptureSink sink;
    LinkParams link{cps_from_mbps(155.52), 1000.0};
    Port port(sim, trace, 0, 0, link, &sink, false, EricaParams{});

    Cell c{1, CellKind::Data, 0, 0, false};
    port.enqueue(c, 0);
    c.vc = 2;
    port.enqueue(c, 0);
    c.vc = 3;
    port.enqueue(c, 100);
    sim.run_until(ns_from_ms(20.0));

    REQUIRE(sink.cells.size() == 3);
    CHECK(sink.cells[0].second == 2726 + 5'000'000);
    CHECK(sink.cells[1].second == 2 * 2726 + 5'000'000);
    CHECK(sink.cells[2].second == 3 * 2726 + 5'000'000);
    CHECK(sink.cells[0].first.vc == 1);  // FIFO order
    CHECK(sink.cells[1].first.vc == 2);
    CHECK(sink.cells[2].first.vc == 3);
    CHECK(port.enqueued_total() == 3);
    CHECK(port.dequeued_total() == 3);
    CHECK(port.qlen() == 0);
    CHECK(port.min_departure_spacing() >= link.service_ns());
}

TEST_CASE("ERICA interval end computes load, active count and fair share") {
    EricaState st;
    st.prm = EricaParams{};
    st.link_rate_cps = cps_from_mbps(155.52);
    CHECK(st.target_rate_cps() == Approx(330113.2075471698).epsilon(1e-12));

    st.interval_start = 0;
    st.abr_cells_this_interval = 354;  // ~150 Mbps over 1 ms
    for (int vc = 0; vc < 5; ++vc) st.active_vcs_this_interval.insert(vc);
    erica_interval_end(st, ns_from_ms(1.0));
    CHECK(st.overload_z == Approx(354000.0 / 330113.2075471698).epsilon(1e-12));
    CHECK(st.n_active == 5);
    CHECK(st.fair_share_cps == Approx(66022.64150943396).epsilon(1e-12));
    CHECK(st.abr_cells_this_interval == 0);
    CHECK(st.active_vcs_this_interval.empty());

    SUBCASE("an empty interval holds z and the fair share") {
        double z = st.overload_z;
        double fair = st.fair_share_cps;
        erica_interval_end(st, st.interval_start + ns_from_ms(1.0));
        CHECK(st.overload_z == z);
        CHECK(st.fair_share_cps == fair);
    }
}

TEST_CASE("overload factor for a 150 Mbps load against the 90% target") {
    EricaState st;
    st.prm = EricaParams{};
    st.link_rate_cps = cps_from_mbps(155.52);
    st.interval_start = 0;
    // 150,000 cells over 424 ms carry exactly 150 Mbps.
    st.abr_cells_this_interval = 150000;
    for (int vc = 0; vc < 5; ++vc) st.active_vcs_this_interval.insert(vc);
    erica_interval_end(st, ns_from_ms(424.0));
    CHECK(st.overload_z == Approx(1.0717).epsilon(1e-4));
    CHECK(st.fair_share_cps == Approx(66023.0).epsilon(1e-4));
}

TEST_CASE("er_feedback worked examples") {
    EricaState st;
    st.link_rate_cps = cps_from_mbps(155.52);
    st.fair_share_cps = 66023.0;
    st.overload_z = 1.0717;

    VcAccounting low;
    low.ccr_seen_cps = 23585.0;
    CHECK(er_feedback(st, low) == Approx(66023.0).epsilon(1e-12));
    CHECK(low.ccr_seen_cps / st.overload_z == Approx(22007.0).epsilon(1e-4));

    st.overload_z = 0.5;
    VcAccounting high;
    high.ccr_seen_cps = 70755.0;
    CHECK(er_feedback(st, high) == Approx(141510.0).epsilon(1e-12));

    SUBCASE("clamped at the link rate") {
        VcAccounting huge;
        huge.ccr_seen_cps = cps_from_mbps(155.52);
        CHECK(er_feedback(st, huge) == Approx(st.link_rate_cps).epsilon(1e-12));
    }
}

TEST_CASE("aging function zero point and growth") {
    CHECK(aging_factor(1.0, 1.0, 1.0) == Approx(0.0));
    CHECK(aging_factor(2.0, 1.0, 1.0) == Approx(4.670774270471606).epsilon(1e-12));
    double prev = aging_factor(1.0, 1.0, 1.0);
    for (double u = 1.1; u < 8.0; u += 0.1) {
        double v = aging_factor(u, 1.0, 1.0);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("switch-based allocation aging") {
    VcAccounting vc;
    vc.rate_estimate_cps = 1000.0;

    SUBCASE("no aging at or below the dead zone") {
        vc.ccr_seen_cps = 1000.0;  // u = 1 = delta
        CHECK(switch_uili_er(vc, 66023.0, 1.0, 1.0) == 66023.0);
        vc.ccr_seen_cps = 500.0;  // u < delta
        CHECK(switch_uili_er(vc, 66023.0, 1.0, 1.0) == 66023.0);
    }
    SUBCASE("a retaining source is cut by the aging divisor") {
        vc.ccr_seen_cps = 2000.0;  // u = 2
        double expect = 66023.0 / (1.0 + (std::exp(2.0) - std::exp(1.0)));
        CHECK(switch_uili_er(vc, 66023.0, 1.0, 1.0) == Approx(expect).epsilon(1e-12));
        CHECK(switch_uili_er(vc, 66023.0, 1.0, 1.0) == Approx(11642.0).epsilon(1e-3));
    }
    SUBCASE("never cut below the measured rate, never above the base") {
        vc.rate_estimate_cps = 30000.0;
        vc.ccr_seen_cps = 300000.0;
        CHECK(switch_uili_er(vc, 66023.0, 1.0, 1.0) == Approx(30000.0));
        vc.rate_estimate_cps = 80000.0;
        vc.ccr_seen_cps = 800000.0;
        CHECK(switch_uili_er(vc, 66023.0, 1.0, 1.0) == 66023.0);  // using its allocation
    }
}

TEST_CASE("interval ends early on the cell-count bound") {
    Simulator sim;
    TraceSink trace;
    CaptureSink sink;
    EricaParams eprm;
    eprm.interval_cells = 100;
    LinkParams link{cps_from_mbps(155.52), 10.0};
    Port port(sim, trace, 0, 0, link, &sink, true, eprm);

    // 100 cells in ~0.3 ms at full rate: the count bound fires first.
    Cell c{4, CellKind::Data, 0, 0, false};
    SimTime t = 0;
    for (int i = 0; i < 100; ++i) {
        SimTime at = t;
        sim.schedule(at, EventKind::TimerExpiry, [&port, c](SimTime now) {
            Cell cc = c;
            port.enqueue(cc, now);
        });
        t += 3000;
    }
    sim.run_until(ns_from_us(299.0));
    REQUIRE(port.erica() != nullptr);
    CHECK(port.erica()->abr_cells_this_interval == 0);  // interval already closed
    CHECK(port.erica()->n_active == 1);
    CHECK(port.erica()->overload_z > 0.9);  // ~333 kc/s against the 330 kc/s target
}

TEST_CASE("BRM stamping takes the min against the forward-port allocation") {
    Simulator sim;
    TraceSink trace;
    CaptureSink a_side, b_side;
    SwitchNode sw(trace, 0, "sw0", false, 1.0, 1.0);
    LinkParams link{cps_from_mbps(155.52), 100.0};
    Port fwd(sim, trace, 0, 0, link, &b_side, true, EricaParams{});
    Port bwd(sim, trace, 0, 1, link, &a_side, true, EricaParams{});
    sw.register_vc(9, &fwd, &bwd);

    // Prime the forward port's state: a known fair share and z.
    fwd.erica()->fair_share_cps = 66023.0;
    fwd.erica()->overload_z = 1.0717;
    fwd.erica()->vcs[9].ccr_seen_cps = 23585.0;

    Cell brm{9, CellKind::Brm, 23585.0, cps_from_mbps(155.52), false};
    sw.deliver(brm, 0);
    Cell low{9, CellKind::Brm, 23585.0, 47170.0, false};
    sw.deliver(low, 10);
    sim.run_until(ns_from_ms(2.0));

    REQUIRE(a_side.cells.size() == 2);
    CHECK(a_side.cells[0].first.er_cps == Approx(66023.0));  // stamped down
    CHECK(a_side.cells[1].first.er_cps == Approx(47170.0));  // already lower: kept
    CHECK(b_side.cells.empty());

    SUBCASE("unknown VC is dropped and counted") {
        Cell stray{77, CellKind::Brm, 0, 0, false};
        sw.deliver(stray, ns_from_ms(2.0));
        CHECK(sw.misrouted() == 1);
    }
}

TEST_CASE("forward RM cells update the claimed rate") {
    Simulator sim;
    TraceSink trace;
    CaptureSink out;
    SwitchNode sw(trace, 0, "sw0", false, 1.0, 1.0);
    LinkParams link{cps_from_mbps(155.52), 100.0};
    Port fwd(sim, trace, 0, 0, link, &out, true, EricaParams{});
    Port bwd(sim, trace, 0, 1, link, &out, true, EricaParams{});
    sw.register_vc(3, &fwd, &bwd);

    Cell frm{3, CellKind::Frm, 57783.25, cps_from_mbps(155.52), false};
    sw.deliver(frm, 0);
    CHECK(fwd.erica()->vcs[3].ccr_seen_cps == 57783.25);
}
