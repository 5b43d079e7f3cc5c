#include "abrsim/switch_fabric.hpp"

#include <algorithm>
#include <cmath>

namespace abrsim {

double aging_factor(double u, double alpha, double delta) {
    return std::exp(alpha * u) - std::exp(alpha * delta);
}

double switch_uili_er(const VcAccounting& vc, double base_er, double alpha, double delta) {
    double est = std::max(vc.rate_estimate_cps, 1e-9);
    double u = vc.ccr_seen_cps / est;
    if (u <= delta) return base_er;
    double aged = base_er / (1.0 + aging_factor(u, alpha, delta));
    return std::min(base_er, std::max(vc.rate_estimate_cps, aged));
}

double er_feedback(const EricaState& st, const VcAccounting& vc) {
    double vc_share = vc.ccr_seen_cps / st.overload_z;
    double er = std::max(st.fair_share_cps, vc_share);
    return std::min(er, st.link_rate_cps);
}

void erica_interval_end(EricaState& st, SimTime now) {
    SimTime elapsed = now - st.interval_start;
    if (elapsed > 0) {
        if (st.abr_cells_this_interval > 0) {
            double input_rate = st.abr_cells_this_interval / sec_from_ns(elapsed);
            st.overload_z = input_rate / st.target_rate_cps();
            st.n_active = static_cast<int>(st.active_vcs_this_interval.size());
            st.fair_share_cps = st.target_rate_cps() / std::max(1, st.n_active);
        }
        // Smooth the per-VC rate estimates; idle VCs decay toward zero.
        double w = st.prm.smoothing_weight;
        for (auto& [vc, acct] : st.vcs) {
            double r = acct.cells_this_interval / sec_from_ns(elapsed);
            acct.rate_estimate_cps = (1.0 - w) * acct.rate_estimate_cps + w * r;
            acct.cells_this_interval = 0;
        }
    }
    st.abr_cells_this_interval = 0;
    st.active_vcs_this_interval.clear();
    st.interval_start = now;
    ++st.interval_gen;
}

Port::Port(Simulator& sim, TraceSink& trace, std::int32_t switch_id, std::int32_t port_id,
           LinkParams link, CellSink* dest, bool erica_enabled, EricaParams eprm)
    : sim_(sim), trace_(trace), switch_id_(switch_id), port_id_(port_id), link_(link),
      dest_(dest), erica_enabled_(erica_enabled) {
    erica_.prm = eprm;
    erica_.link_rate_cps = link.rate_cps;
    erica_.fair_share_cps = erica_.target_rate_cps();
    erica_.interval_start = sim_.now();
    if (erica_enabled_) arm_interval_timer();
}

void Port::arm_interval_timer() {
    std::uint64_t gen = erica_.interval_gen;
    sim_.schedule(erica_.interval_start + erica_.prm.interval_ns, EventKind::IntervalEnd,
                  [this, gen](SimTime now) {
                      if (gen != erica_.interval_gen) return;  // ended early by cell count
                      end_interval(now);
                  });
}

void Port::end_interval(SimTime now) {
    erica_interval_end(erica_, now);
    arm_interval_timer();
}

void Port::enqueue(Cell cell, SimTime now) {
    if (erica_enabled_) {
        ++erica_.abr_cells_this_interval;
        erica_.vcs[cell.vc].cells_this_interval++;
        // Only a VC's own forward traffic marks it active here; backward RM
        // cells of other VCs pass through without claiming a share.
        if (cell.is_forward()) erica_.active_vcs_this_interval.insert(cell.vc);
        if (erica_.abr_cells_this_interval >= erica_.prm.interval_cells) end_interval(now);
    }
    fifo_.push_back(cell);
    ++enqueued_;
    max_qlen_ = std::max(max_qlen_, qlen());
    if (traced_) trace_.queue(now, switch_id_, port_id_, qlen());
    if (!busy_) {
        busy_ = true;
        sim_.schedule(now + link_.service_ns(), EventKind::CellDeparture,
                      [this](SimTime t) { depart(t); });
    }
}

void Port::depart(SimTime now) {
    Cell cell = fifo_.front();
    fifo_.pop_front();
    ++dequeued_;
    if (last_departure_ >= 0) min_dep_spacing_ = std::min(min_dep_spacing_, now - last_departure_);
    last_departure_ = now;
    if (traced_) trace_.queue(now, switch_id_, port_id_, qlen());

    Cell delivered = cell;
    sim_.schedule(now + link_.prop_ns(), EventKind::CellArrival,
                  [this, delivered](SimTime t) { dest_->deliver(delivered, t); });

    if (!fifo_.empty()) {
        sim_.schedule(now + link_.service_ns(), EventKind::CellDeparture,
                      [this](SimTime t) { depart(t); });
    } else {
        busy_ = false;
    }
}

void SwitchNode::register_vc(std::int32_t vc, Port* fwd_out, Port* bwd_out) {
    routes_[vc] = Route{fwd_out, bwd_out};
}

void SwitchNode::deliver(const Cell& cell, SimTime now) {
    auto it = routes_.find(cell.vc);
    if (it == routes_.end()) {
        ++misrouted_;
        return;
    }
    const Route& route = it->second;
    Cell out = cell;
    if (cell.kind == CellKind::Brm) {
        // The allocation a switch imposes on a VC comes from the port its
        // forward traffic uses; the stamp rides the returning BRM.
        if (EricaState* st = route.fwd_out->erica()) {
            VcAccounting& acct = st->vcs[cell.vc];
            double er = er_feedback(*st, acct);
            if (aging_enabled_) er = switch_uili_er(acct, er, aging_alpha_, aging_delta_);
            double before = out.er_cps;
            out.er_cps = std::min(out.er_cps, er);
            trace_.er_stamp(now, cell.vc, id_, cell.rm_id, before, out.er_cps);
        }
        route.bwd_out->enqueue(out, now);
    } else {
        if (cell.kind == CellKind::Frm) {
            if (EricaState* st = route.fwd_out->erica()) {
                st->vcs[cell.vc].ccr_seen_cps = cell.ccr_cps;
            }
        }
        route.fwd_out->enqueue(out, now);
    }
}

}  // namespace abrsim
