#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "abrsim/sim_time.hpp"

namespace abrsim {

enum class AcrEvent : std::uint8_t { Frm, Uili, Brm, Atdf };

const char* acr_event_name(AcrEvent e);

struct AcrTraceRecord {
    SimTime t = 0;
    std::int32_t vc = -1;
    double acr_cps = 0.0;
    double sr_cps = 0.0;  // last measured SR
    char region = '-';    // 'A'..'D', '-' when not at an FRM send
    AcrEvent event = AcrEvent::Frm;
};

struct QueueTraceRecord {
    SimTime t = 0;
    std::int32_t switch_id = -1;
    std::int32_t port_id = -1;
    std::int32_t qlen = 0;
};

struct BurstRecord {
    std::int32_t vc = -1;
    std::int64_t burst_index = 0;
    std::int64_t size_cells = 0;
    SimTime first_cell_at = 0;
    SimTime last_cell_at = 0;
    SimTime response_ns = 0;
    double throughput_bps = 0.0;
};

// One ER stamp applied by a switch to a passing BRM; used to audit the
// min-stamping invariant end to end.
struct ErStampRecord {
    SimTime t = 0;
    std::int32_t vc = -1;
    std::int32_t switch_id = -1;
    std::int64_t rm_id = -1;
    double er_in = 0.0;
    double er_out = 0.0;
};

// ER carried by a BRM as delivered back to its source.
struct BrmDeliveryRecord {
    SimTime t = 0;
    std::int32_t vc = -1;
    std::int64_t rm_id = -1;
    double er_cps = 0.0;
};

// Collects every trace stream of a run in memory; CSV emission is a separate
// step so tests can assert on the records directly.
class TraceSink {
  public:
    void register_vc(std::int32_t vc, std::string name);
    void register_switch(std::int32_t sw, std::string name);
    void register_port(std::int32_t sw, std::int32_t port, std::string name);

    void acr(SimTime t, std::int32_t vc, double acr_cps, double sr_cps, char region, AcrEvent e) {
        acr_.push_back({t, vc, acr_cps, sr_cps, region, e});
    }
    void queue(SimTime t, std::int32_t sw, std::int32_t port, std::int32_t qlen) {
        if (record_queue) queue_.push_back({t, sw, port, qlen});
    }
    void burst(const BurstRecord& b) { bursts_.push_back(b); }
    void er_stamp(SimTime t, std::int32_t vc, std::int32_t sw, std::int64_t rm_id, double er_in,
                  double er_out) {
        if (record_stamps) stamps_.push_back({t, vc, sw, rm_id, er_in, er_out});
    }
    void brm_delivered(SimTime t, std::int32_t vc, std::int64_t rm_id, double er) {
        if (record_stamps) brm_deliveries_.push_back({t, vc, rm_id, er});
    }

    const std::vector<AcrTraceRecord>& acr_records() const { return acr_; }
    const std::vector<QueueTraceRecord>& queue_records() const { return queue_; }
    const std::vector<BurstRecord>& burst_records() const { return bursts_; }
    const std::vector<ErStampRecord>& er_stamps() const { return stamps_; }
    const std::vector<BrmDeliveryRecord>& brm_deliveries() const { return brm_deliveries_; }

    const std::string& vc_name(std::int32_t vc) const;
    const std::string& switch_name(std::int32_t sw) const;
    const std::string& port_name(std::int32_t sw, std::int32_t port) const;

    std::string acr_csv() const;
    std::string queue_csv() const;
    std::string burst_csv() const;

    // Writes acr_trace.csv, queue_trace.csv, burst_records.csv under dir.
    void write_csvs(const std::string& dir) const;

    bool record_queue = true;
    bool record_stamps = true;

  private:
    std::vector<AcrTraceRecord> acr_;
    std::vector<QueueTraceRecord> queue_;
    std::vector<BurstRecord> bursts_;
    std::vector<ErStampRecord> stamps_;
    std::vector<BrmDeliveryRecord> brm_deliveries_;
    std::map<std::int32_t, std::string> vc_names_;
    std::map<std::int32_t, std::string> switch_names_;
    std::map<std::pair<std::int32_t, std::int32_t>, std::string> port_names_;
};

}  // namespace abrsim
