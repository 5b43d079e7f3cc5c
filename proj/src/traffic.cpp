#include "abrsim/traffic.hpp"

#include <stdexcept>

#include "abrsim/source.hpp"

namespace abrsim {

void GreedyTraffic::start(Simulator& sim) {
    if (ses_) ses_->wake(sim.now());
}

double BottleneckSchedule::cap_at(SimTime now) const {
    for (const auto& seg : segments) {
        if (now < seg.until_ns) return seg.cap_cps;
    }
    return segments.empty() ? kUnboundedRate : segments.back().cap_cps;
}

void BottleneckTraffic::start(Simulator& sim) {
    if (ses_) ses_->wake(sim.now());
    // Re-pace at every segment boundary so cap changes take effect exactly
    // on the boundary instead of one stale inter-cell gap later.
    for (const auto& seg : sched_.segments) {
        if (seg.until_ns <= sim.now() || seg.until_ns == INT64_MAX) continue;
        sim.schedule(seg.until_ns, EventKind::TimerExpiry, [this](SimTime t) {
            if (ses_) ses_->wake(t);
        });
    }
}

SimTime burst_response_ns(SimTime first_cell_at, SimTime last_cell_at, SimTime last_gap_ns) {
    return last_cell_at - first_cell_at + last_gap_ns;
}

BurstRecord make_burst_record(std::int32_t vc, std::int64_t index, std::int64_t size_cells,
                              SimTime first_cell_at, SimTime last_cell_at, SimTime last_gap_ns) {
    BurstRecord b;
    b.vc = vc;
    b.burst_index = index;
    b.size_cells = size_cells;
    b.first_cell_at = first_cell_at;
    b.last_cell_at = last_cell_at;
    b.response_ns = burst_response_ns(first_cell_at, last_cell_at, last_gap_ns);
    b.throughput_bps = size_cells * kCellBits / sec_from_ns(b.response_ns);
    return b;
}

void ClosedLoopClient::start(Simulator& sim) {
    sim.schedule(sim.now(), EventKind::CycleStart, [this](SimTime t) { cycle_start(t); });
}

void ClosedLoopClient::cycle_start(SimTime now) {
    if (cycle_open_) throw std::logic_error("closed-loop client: overlapping cycles");
    cycle_open_ = true;
    requests_launched_ = 0;
    response_cells_got_ = 0;
    launch_request(now);
}

void ClosedLoopClient::launch_request(SimTime now) {
    ++requests_launched_;
    backlog_ += prm_.request_cells;
    burst_sent_ = 0;
    if (ses_) ses_->wake(now);
}

void ClosedLoopClient::on_data_cell_sent(SimTime now, SimTime gap_ns) {
    if (backlog_ <= 0) throw std::logic_error("closed-loop client: sent without backlog");
    if (burst_sent_ == 0) burst_first_at_ = now;
    ++burst_sent_;
    --backlog_;
    burst_last_at_ = now;
    burst_last_gap_ = gap_ns;
    if (backlog_ == 0) {
        trace_.burst(make_burst_record(vc_, burst_index_++, burst_sent_, burst_first_at_,
                                       burst_last_at_, burst_last_gap_));
        burst_sent_ = 0;
        if (requests_launched_ < prm_.requests_per_cycle) {
            sim_.schedule(now + prm_.inter_request_ns, EventKind::TimerExpiry,
                          [this](SimTime t) { launch_request(t); });
        }
    }
}

void ClosedLoopClient::on_response_data(SimTime now) {
    if (!cycle_open_) {
        throw std::logic_error("closed-loop client: response cell with no outstanding request");
    }
    ++response_cells_got_;
    if (response_cells_got_ == prm_.response_cells * prm_.requests_per_cycle) {
        cycle_open_ = false;
        ++cycles_completed_;
        sim_.schedule(now + prm_.inter_cycle_ns, EventKind::CycleStart,
                      [this](SimTime t) { cycle_start(t); });
    }
}

void ClosedLoopServer::on_request_data(SimTime now) {
    ++rx_cells_;
    if (rx_cells_ == prm_.request_cells) {
        rx_cells_ = 0;
        backlog_ += prm_.response_cells;
        if (ses_) ses_->wake(now);
    }
}

void ClosedLoopServer::on_data_cell_sent(SimTime now, SimTime gap_ns) {
    if (backlog_ <= 0) throw std::logic_error("closed-loop server: sent without backlog");
    if (burst_sent_ == 0) burst_first_at_ = now;
    ++burst_sent_;
    --backlog_;
    burst_last_at_ = now;
    burst_last_gap_ = gap_ns;
    if (backlog_ == 0) {
        trace_.burst(make_burst_record(vc_, burst_index_++, burst_sent_, burst_first_at_,
                                       burst_last_at_, burst_last_gap_));
        burst_sent_ = 0;
    }
}

}  // namespace abrsim
