#include "abrsim/source.hpp"

#include <algorithm>
#include <stdexcept>

namespace abrsim {

double measure_sr(std::int64_t cells, SimTime window_ns) {
    if (window_ns <= 0) throw std::logic_error("measure_sr: empty measurement window");
    return static_cast<double>(cells) / sec_from_ns(window_ns);
}

SourceEndSystem::SourceEndSystem(Simulator& sim, TraceSink& trace, std::int32_t vc,
                                 SourceParams params, PolicyConfig policy, Port* out,
                                 TrafficModel* traffic)
    : sim_(sim), trace_(trace), vc_(vc), p_(params), pol_(policy), out_(out), traffic_(traffic) {
    st_.acr = p_.icr_cps;  // ACR starts at the initial cell rate
    if (traffic_) traffic_->attach(this);
}

double SourceEndSystem::current_rate(SimTime now) const {
    double cap = traffic_ ? traffic_->rate_cap_cps(now) : kUnboundedRate;
    return std::min(st_.acr, cap);
}

void SourceEndSystem::check_bounds() const {
    if (st_.acr < p_.mcr_cps - 1e-9 || st_.acr > p_.pcr_cps + 1e-9) {
        throw std::logic_error("ACR left [MCR, PCR]: " + std::to_string(st_.acr));
    }
}

void SourceEndSystem::set_acr(double v, SimTime now, AcrEvent ev) {
    if (v == st_.acr) return;
    acr_time_weighted_ += st_.acr * static_cast<double>(now - acr_last_change_);
    acr_last_change_ = now;
    st_.acr = v;
    check_bounds();
    trace_.acr(now, vc_, st_.acr, last_sr_cps_, '-', ev);
}

double SourceEndSystem::mean_acr(SimTime now) const {
    double acc = acr_time_weighted_ + st_.acr * static_cast<double>(now - acr_last_change_);
    return now > 0 ? acc / static_cast<double>(now) : st_.acr;
}

void SourceEndSystem::wake(SimTime now) {
    if (traffic_ && traffic_->has_data(now) && current_rate(now) > 0.0) arm(now);
}

void SourceEndSystem::arm(SimTime now) {
    std::uint64_t gen = ++pace_gen_;
    SimTime at = now;
    if (last_send_at_ >= 0) {
        at = std::max(now, last_send_at_ + cell_gap_ns(current_rate(now)));
    }
    sim_.schedule(at, EventKind::CellDeparture,
                  [this, gen](SimTime t) { on_send_opportunity(t, gen); });
}

void SourceEndSystem::on_send_opportunity(SimTime now, std::uint64_t gen) {
    if (gen != pace_gen_) return;  // superseded by a re-arm

    if (pol_.has_source_timeout() && last_send_at_ >= 0 &&
        now - last_activity_at_ > p_.atdf_ns && st_.acr > p_.icr_cps) {
        set_acr(p_.icr_cps, now, AcrEvent::Atdf);
    }

    double rate = current_rate(now);
    if (!traffic_->has_data(now) || rate <= 0.0) return;  // idle until woken

    if (last_send_at_ >= 0) {
        SimTime required = last_send_at_ + cell_gap_ns(rate);
        if (now < required) {
            std::uint64_t g = ++pace_gen_;
            sim_.schedule(required, EventKind::CellDeparture,
                          [this, g](SimTime t) { on_send_opportunity(t, g); });
            return;
        }
    }

    Cell cell;
    cell.vc = vc_;
    bool frm = (cells_since_frm_ == p_.nrm - 1) || (now - last_frm_at_ > p_.trm_ns);
    if (frm) {
        do_frm_send(now, cell);
    } else {
        cell.kind = CellKind::Data;
        ++cells_since_frm_;
        ++data_sent_;
        traffic_->on_data_cell_sent(now, cell_gap_ns(rate));
    }
    out_->enqueue(cell, now);
    last_send_at_ = now;
    last_activity_at_ = now;

    if (traffic_->has_data(now) && rate > 0.0) {
        std::uint64_t g = ++pace_gen_;
        sim_.schedule(now + cell_gap_ns(rate), EventKind::CellDeparture,
                      [this, g](SimTime t) { on_send_opportunity(t, g); });
    }
}

void SourceEndSystem::do_frm_send(SimTime now, Cell& cell) {
    SimTime window = now - last_frm_at_;
    // SR over the actual window: the cells since the last FRM plus this one.
    double sr = measure_sr(cells_since_frm_ + 1, window);
    last_sr_cps_ = sr;

    double before = st_.acr;
    Region region = classify_region(before, sr, p_.headroom_cps, p_.delta_cps);
    FrmStepResult res = policy_frm_step(st_, p_, pol_, sr, window);
    check_bounds();
    if (st_.acr != before) {
        acr_time_weighted_ += before * static_cast<double>(now - acr_last_change_);
        acr_last_change_ = now;
    }
    trace_.acr(now, vc_, st_.acr, sr, static_cast<char>(region),
               res.triggered ? AcrEvent::Uili : AcrEvent::Frm);

    cell.kind = CellKind::Frm;
    cell.ccr_cps = st_.acr;
    cell.er_cps = p_.pcr_cps;
    cell.ni = false;
    cell.rm_id = (static_cast<std::int64_t>(vc_) << 40) | frm_sent_;
    ++frm_sent_;
    cells_since_frm_ = 0;
    last_frm_at_ = now;
}

void SourceEndSystem::on_brm(const Cell& cell, SimTime now) {
    ++brm_rx_;
    trace_.brm_delivered(now, vc_, cell.rm_id, cell.er_cps);
    double before = st_.acr;
    if (brm_increase_gate(st_, p_, pol_, cell.ni)) {
        st_.pr5 = st_.acr < cell.er_cps;  // a network-directed increase is coming
        st_.acr = std::min(st_.acr + p_.rif * p_.pcr_cps, p_.pcr_cps);
    }
    st_.acr = std::min(st_.acr, cell.er_cps);
    st_.acr = std::max(st_.acr, p_.mcr_cps);
    check_bounds();
    if (st_.acr != before) {
        acr_time_weighted_ += before * static_cast<double>(now - acr_last_change_);
        acr_last_change_ = now;
        trace_.acr(now, vc_, st_.acr, last_sr_cps_, '-', AcrEvent::Brm);
    }
    if (st_.acr > before) wake(now);  // re-pace at the higher rate
}

void DestinationEndSystem::on_forward_cell(const Cell& cell, SimTime now) {
    if (cell.kind == CellKind::Frm) {
        Cell brm = cell;
        brm.kind = CellKind::Brm;
        ++frm_turned_;
        reverse_out_->enqueue(brm, now);
        return;
    }
    ++data_rx_;
    if (on_data_) on_data_(now);
}

void HostNode::deliver(const Cell& cell, SimTime now) {
    if (cell.kind == CellKind::Brm) {
        auto it = ses_.find(cell.vc);
        if (it == ses_.end()) {
            ++misrouted_;
            return;
        }
        it->second->on_brm(cell, now);
        return;
    }
    auto it = des_.find(cell.vc);
    if (it == des_.end()) {
        ++misrouted_;
        return;
    }
    it->second->on_forward_cell(cell, now);
}

}  // namespace abrsim
