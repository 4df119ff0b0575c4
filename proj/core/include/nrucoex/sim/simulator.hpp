#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "nrucoex/sim/time.hpp"

namespace nrucoex::sim {

class SchedulingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct EventHandle {
  std::uint64_t id = 0;
  SimTime due;
  std::uint64_t sequence = 0;
};

/**
 * Single-threaded discrete-event engine.
 *
 * Events are ordered by (due, sequence); the sequence is an insertion
 * counter so that equal-time events run in the order they were scheduled.
 * Not shareable across threads.
 */
class Simulator {
 public:
  using Action = std::function<void()>;

  Simulator() = default;
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  // Throws SchedulingError when due < now().
  EventHandle schedule(SimTime due, Action action);
  EventHandle schedule_in(SimTime delay, Action action) { return schedule(now_ + delay, std::move(action)); }

  // True if the event was pending and is now removed.
  bool cancel(const EventHandle& handle);
  bool is_pending(const EventHandle& handle) const { return pending_.contains(handle.id); }

  // Executes every event with due <= end, then sets the clock to end.
  std::uint64_t run_until(SimTime end);

  SimTime now() const { return now_; }
  std::uint64_t executed_events() const { return executed_; }
  std::size_t pending_events() const { return pending_.size(); }

 private:
  struct Entry {
    SimTime due;
    std::uint64_t sequence;
    std::uint64_t id;
    // mutable so the action can be moved out of the heap top before pop().
    mutable Action action;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.due != b.due) return a.due > b.due;
      return a.sequence > b.sequence;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  std::unordered_set<std::uint64_t> pending_;
  SimTime now_;
  std::uint64_t next_id_ = 1;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t executed_ = 0;
};

}  // namespace nrucoex::sim
