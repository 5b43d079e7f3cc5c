#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "abrsim/event_queue.hpp"
#include "abrsim/trace.hpp"

namespace abrsim {

class SourceEndSystem;

constexpr double kUnboundedRate = std::numeric_limits<double>::infinity();

// Application-layer generator feeding one SES. The SES pulls: it asks for
// data and a rate cap at each send opportunity and reports sent data cells;
// models call wake() on the SES when new data or rate becomes available.
class TrafficModel {
  public:
    virtual ~TrafficModel() = default;

    virtual bool has_data(SimTime now) const = 0;
    virtual double rate_cap_cps(SimTime /*now*/) const { return kUnboundedRate; }
    virtual void on_data_cell_sent(SimTime /*now*/, SimTime /*gap_ns*/) {}

    void attach(SourceEndSystem* ses) { ses_ = ses; }
    // Schedule initial events (first cycle, cap-segment boundaries).
    virtual void start(Simulator& /*sim*/) {}

  protected:
    SourceEndSystem* ses_ = nullptr;
};

// Infinite backlog.
class GreedyTraffic : public TrafficModel {
  public:
    bool has_data(SimTime) const override { return true; }
    void start(Simulator& sim) override;
};

// Piecewise-constant transmission cap; segments are half-open [start, until).
// The final segment extends to the end of the run. A cap of zero parks the
// source for the segment.
struct BottleneckSchedule {
    struct Segment {
        SimTime until_ns = 0;  // INT64_MAX for the last segment
        double cap_cps = kUnboundedRate;
    };
    std::vector<Segment> segments;

    double cap_at(SimTime now) const;
};

class BottleneckTraffic : public TrafficModel {
  public:
    explicit BottleneckTraffic(BottleneckSchedule sched) : sched_(std::move(sched)) {}

    bool has_data(SimTime) const override { return true; }
    double rate_cap_cps(SimTime now) const override { return sched_.cap_at(now); }
    void start(Simulator& sim) override;

  private:
    BottleneckSchedule sched_;
};

SimTime burst_response_ns(SimTime first_cell_at, SimTime last_cell_at, SimTime last_gap_ns);

BurstRecord make_burst_record(std::int32_t vc, std::int64_t index, std::int64_t size_cells,
                              SimTime first_cell_at, SimTime last_cell_at, SimTime last_gap_ns);

struct ClosedLoopParams {
    std::int64_t request_cells = 256;
    std::int64_t response_cells = 16;
    SimTime inter_cycle_ns = ns_from_ms(1.0);
    SimTime inter_request_ns = 0;
    int requests_per_cycle = 1;
};

// Request side of the request/response cycle. Each request burst lands in the
// SES as an instantaneous backlog that drains at the allowed rate; the next
// cycle starts one inter-cycle time after the full response returns.
class ClosedLoopClient : public TrafficModel {
  public:
    ClosedLoopClient(Simulator& sim, TraceSink& trace, std::int32_t vc, ClosedLoopParams prm)
        : sim_(sim), trace_(trace), vc_(vc), prm_(prm) {}

    bool has_data(SimTime) const override { return backlog_ > 0; }
    void on_data_cell_sent(SimTime now, SimTime gap_ns) override;
    void start(Simulator& sim) override;

    // Wired to the DES of the reverse VC.
    void on_response_data(SimTime now);

    std::int64_t cycles_completed() const { return cycles_completed_; }

  private:
    void cycle_start(SimTime now);
    void launch_request(SimTime now);

    Simulator& sim_;
    TraceSink& trace_;
    std::int32_t vc_;
    ClosedLoopParams prm_;

    std::int64_t backlog_ = 0;
    bool cycle_open_ = false;
    int requests_launched_ = 0;
    std::int64_t response_cells_got_ = 0;
    std::int64_t cycles_completed_ = 0;

    std::int64_t burst_index_ = 0;
    std::int64_t burst_sent_ = 0;
    SimTime burst_first_at_ = 0;
    SimTime burst_last_at_ = 0;
    SimTime burst_last_gap_ = 0;
};

// Response side: emits one response burst per fully received request.
class ClosedLoopServer : public TrafficModel {
  public:
    ClosedLoopServer(TraceSink& trace, std::int32_t vc, ClosedLoopParams prm)
        : trace_(trace), vc_(vc), prm_(prm) {}

    bool has_data(SimTime) const override { return backlog_ > 0; }
    void on_data_cell_sent(SimTime now, SimTime gap_ns) override;

    // Wired to the DES of the request VC.
    void on_request_data(SimTime now);

  private:
    TraceSink& trace_;
    std::int32_t vc_;
    ClosedLoopParams prm_;

    std::int64_t rx_cells_ = 0;
    std::int64_t backlog_ = 0;

    std::int64_t burst_index_ = 0;
    std::int64_t burst_sent_ = 0;
    SimTime burst_first_at_ = 0;
    SimTime burst_last_at_ = 0;
    SimTime burst_last_gap_ = 0;
};

}  // namespace abrsim
