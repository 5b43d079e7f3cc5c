#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "abrsim/sim_time.hpp"

namespace abrsim {

enum class EventKind : std::uint8_t {
    CellDeparture,
    CellArrival,
    IntervalEnd,
    TimerExpiry,
    CycleStart,
};

struct Event {
    SimTime fire_at = 0;
    std::uint64_t seq = 0;  // insertion order; breaks ties at equal fire_at
    EventKind kind = EventKind::TimerExpiry;
    std::function<void(SimTime)> action;
};

// Deterministic single-threaded event engine. Events dispatch in
// (fire_at, seq) order; two runs over the same schedule produce identical
// dispatch sequences.
class Simulator {
  public:
    SimTime now() const { return now_; }

    // Scheduling into the past is a programming error.
    void schedule(SimTime fire_at, EventKind kind, std::function<void(SimTime)> action);

    // Dispatches every event with fire_at <= t_end, then advances the clock
    // to t_end. Returns the number of events dispatched by this call.
    std::uint64_t run_until(SimTime t_end);

    std::size_t pending() const { return queue_.size(); }
    std::uint64_t dispatched_total() const { return dispatched_; }

  private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    SimTime now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t dispatched_ = 0;
};

}  // namespace abrsim
