#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>

#include "abrsim/cell.hpp"
#include "abrsim/event_queue.hpp"
#include "abrsim/trace.hpp"

namespace abrsim {

struct LinkParams {
    double rate_cps = cps_from_mbps(155.52);
    double length_km = 1000.0;

    SimTime prop_ns() const { return prop_delay_ns(length_km); }
    SimTime service_ns() const { return cell_gap_ns(rate_cps); }
};

struct EricaParams {
    double target_utilization = 0.9;
    SimTime interval_ns = ns_from_ms(1.0);
    int interval_cells = 100;
    double smoothing_weight = 0.5;  // per-interval rate-estimate smoothing
};

struct VcAccounting {
    double ccr_seen_cps = 0.0;       // from the last forward RM cell
    double rate_estimate_cps = 0.0;  // smoothed arrival rate (for aging)
    std::int64_t cells_this_interval = 0;
};

// Per output port interval accounting. The averaging interval ends after
// interval_ns or interval_cells arrivals, whichever comes first. z and the
// fair share are held across empty intervals.
struct EricaState {
    EricaParams prm;
    double link_rate_cps = 0.0;

    std::int64_t abr_cells_this_interval = 0;
    SimTime interval_start = 0;
    std::uint64_t interval_gen = 0;
    std::set<std::int32_t> active_vcs_this_interval;

    double overload_z = 1.0;
    double fair_share_cps = 0.0;
    int n_active = 0;

    std::map<std::int32_t, VcAccounting> vcs;

    double target_rate_cps() const { return prm.target_utilization * link_rate_cps; }
};

// Switch-based UILI aging function: e^{alpha*u} - e^{alpha*delta}.
double aging_factor(double u, double alpha, double delta);

// Conservative allocation for a VC whose claimed rate exceeds its measured
// rate. Returns base_er untouched at or below the dead zone (u <= delta);
// never reduces below the measured rate and never raises above base_er.
double switch_uili_er(const VcAccounting& vc, double base_er, double alpha, double delta);

// Basic explicit-rate feedback: max(fair share, CCR/z), clamped to link rate.
double er_feedback(const EricaState& st, const VcAccounting& vc);

// Closes the current averaging interval and opens the next one.
void erica_interval_end(EricaState& st, SimTime now);

// Output-queued FIFO transmitter for one unidirectional link. Switch output
// ports carry ERICA state; host NIC ports are plain FIFOs.
class Port {
  public:
    Port(Simulator& sim, TraceSink& trace, std::int32_t switch_id, std::int32_t port_id,
         LinkParams link, CellSink* dest, bool erica_enabled, EricaParams eprm);

    void enqueue(Cell cell, SimTime now);

    EricaState* erica() { return erica_enabled_ ? &erica_ : nullptr; }
    const EricaState* erica() const { return erica_enabled_ ? &erica_ : nullptr; }

    const LinkParams& link() const { return link_; }
    std::int64_t enqueued_total() const { return enqueued_; }
    std::int64_t dequeued_total() const { return dequeued_; }
    std::int32_t qlen() const { return static_cast<std::int32_t>(fifo_.size()); }
    std::int32_t max_qlen() const { return max_qlen_; }
    SimTime min_departure_spacing() const { return min_dep_spacing_; }
    std::int32_t switch_id() const { return switch_id_; }
    std::int32_t port_id() const { return port_id_; }

    // Fraction of the run the link spent transmitting.
    double utilization(SimTime run_ns) const {
        return run_ns > 0 ? static_cast<double>(dequeued_) * link_.service_ns() / run_ns : 0.0;
    }

    // Only switch ports emit queue-trace rows.
    void set_traced(bool v) { traced_ = v; }

  private:
    void depart(SimTime now);
    void end_interval(SimTime now);
    void arm_interval_timer();

    Simulator& sim_;
    TraceSink& trace_;
    std::int32_t switch_id_;
    std::int32_t port_id_;
    LinkParams link_;
    CellSink* dest_;
    bool erica_enabled_;
    EricaState erica_;

    std::deque<Cell> fifo_;
    bool busy_ = false;
    std::int64_t enqueued_ = 0;
    std::int64_t dequeued_ = 0;
    std::int32_t max_qlen_ = 0;
    SimTime last_departure_ = -1;
    SimTime min_dep_spacing_ = INT64_MAX;
    bool traced_ = false;
};

// Routes cells by VC, stamps explicit rates into backward RM cells against
// the VC's forward output port, and applies the optional per-VC aging.
class SwitchNode : public CellSink {
  public:
    SwitchNode(TraceSink& trace, std::int32_t id, std::string name, bool aging_enabled,
               double aging_alpha, double aging_delta)
        : trace_(trace), id_(id), name_(std::move(name)), aging_enabled_(aging_enabled),
          aging_alpha_(aging_alpha), aging_delta_(aging_delta) {}

    void register_vc(std::int32_t vc, Port* fwd_out, Port* bwd_out);
    void deliver(const Cell& cell, SimTime now) override;

    std::int32_t id() const { return id_; }
    const std::string& name() const { return name_; }
    std::int64_t misrouted() const { return misrouted_; }

  private:
    struct Route {
        Port* fwd_out = nullptr;
        Port* bwd_out = nullptr;
    };

    TraceSink& trace_;
    std::int32_t id_;
    std::string name_;
    bool aging_enabled_;
    double aging_alpha_;
    double aging_delta_;
    std::map<std::int32_t, Route> routes_;
    std::int64_t misrouted_ = 0;
};

}  // namespace abrsim
