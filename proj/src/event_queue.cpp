#include "abrsim/event_queue.hpp"

#include <stdexcept>
#include <string>

namespace abrsim {

void Simulator::schedule(SimTime fire_at, EventKind kind, std::function<void(SimTime)> action) {
    if (fire_at < now_) {
        throw std::logic_error("Simulator::schedule: event at t=" + std::to_string(fire_at) +
                               " ns is in the past (clock=" + std::to_string(now_) + " ns)");
    }
    queue_.push(Event{fire_at, next_seq_++, kind, std::move(action)});
}

std::uint64_t Simulator::run_until(SimTime t_end) {
    if (t_end < now_) {
        throw std::logic_error("Simulator::run_until: t_end precedes the clock");
    }
    std::uint64_t count = 0;
    while (!queue_.empty() && queue_.top().fire_at <= t_end) {
        Event ev = queue_.top();
        queue_.pop();
        now_ = ev.fire_at;
        ev.action(now_);
        ++count;
    }
    now_ = t_end;
    dispatched_ += count;
    return count;
}

}  // namespace abrsim
