#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "abrsim/cell.hpp"
#include "abrsim/event_queue.hpp"
#include "abrsim/policy.hpp"
#include "abrsim/source_params.hpp"
#include "abrsim/switch_fabric.hpp"
#include "abrsim/trace.hpp"
#include "abrsim/traffic.hpp"

namespace abrsim {

// Measured source rate over one FRM window: cells sent divided by elapsed
// time. A zero-length window cannot occur in a well-formed cell stream.
double measure_sr(std::int64_t cells, SimTime window_ns);

// ABR source end system for one VC: paces cells at min(ACR, cap), emits a
// forward RM cell after every Nrm-1 data cells (or when Trm lapses), measures
// the source rate over each FRM window, runs the UILI policy step, and
// processes returning BRMs.
class SourceEndSystem {
  public:
    SourceEndSystem(Simulator& sim, TraceSink& trace, std::int32_t vc, SourceParams params,
                    PolicyConfig policy, Port* out, TrafficModel* traffic);

    // Data or rate became available; (re)arm the pacer.
    void wake(SimTime now);

    void on_brm(const Cell& cell, SimTime now);

    double acr() const { return st_.acr; }
    const UiliState& uili_state() const { return st_; }
    std::int64_t frm_sent() const { return frm_sent_; }
    std::int64_t data_sent() const { return data_sent_; }
    std::int64_t brm_received() const { return brm_rx_; }
    std::int32_t vc() const { return vc_; }
    const SourceParams& params() const { return p_; }

    // Time-weighted mean ACR over [0, now].
    double mean_acr(SimTime now) const;

  private:
    void arm(SimTime now);
    void on_send_opportunity(SimTime now, std::uint64_t gen);
    void do_frm_send(SimTime now, Cell& cell);
    void set_acr(double v, SimTime now, AcrEvent ev);
    double current_rate(SimTime now) const;
    void check_bounds() const;

    Simulator& sim_;
    TraceSink& trace_;
    std::int32_t vc_;
    SourceParams p_;
    PolicyConfig pol_;
    Port* out_;
    TrafficModel* traffic_;

    UiliState st_;
    SimTime last_frm_at_ = 0;  // connection start counts as the window origin
    int cells_since_frm_ = 0;
    SimTime last_send_at_ = -1;
    SimTime last_activity_at_ = 0;
    double last_sr_cps_ = 0.0;

    std::uint64_t pace_gen_ = 0;
    std::int64_t frm_sent_ = 0;
    std::int64_t data_sent_ = 0;
    std::int64_t brm_rx_ = 0;

    double acr_time_weighted_ = 0.0;  // integral of acr dt
    SimTime acr_last_change_ = 0;
};

// Destination end system: hands data cells to the application and turns
// forward RM cells around onto the reverse path with zero processing delay.
class DestinationEndSystem {
  public:
    DestinationEndSystem(std::int32_t vc, Port* reverse_out,
                         std::function<void(SimTime)> on_data = {})
        : vc_(vc), reverse_out_(reverse_out), on_data_(std::move(on_data)) {}

    void on_forward_cell(const Cell& cell, SimTime now);

    std::int64_t data_received() const { return data_rx_; }
    std::int64_t frm_turned() const { return frm_turned_; }

  private:
    std::int32_t vc_;
    Port* reverse_out_;
    std::function<void(SimTime)> on_data_;
    std::int64_t data_rx_ = 0;
    std::int64_t frm_turned_ = 0;
};

// A host endpoint: owns the SES of its outgoing VCs and the DES of its
// incoming VCs, all sharing the host's uplink port.
class HostNode : public CellSink {
  public:
    explicit HostNode(std::string name) : name_(std::move(name)) {}

    void add_ses(std::int32_t vc, SourceEndSystem* ses) { ses_[vc] = ses; }
    void add_des(std::int32_t vc, DestinationEndSystem* des) { des_[vc] = des; }

    void deliver(const Cell& cell, SimTime now) override;

    const std::string& name() const { return name_; }
    std::int64_t misrouted() const { return misrouted_; }

  private:
    std::string name_;
    std::map<std::int32_t, SourceEndSystem*> ses_;
    std::map<std::int32_t, DestinationEndSystem*> des_;
    std::int64_t misrouted_ = 0;
};

}  // namespace abrsim
