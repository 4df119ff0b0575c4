#include "nrucoex/sim/simulator.hpp"

#include <sstream>

namespace nrucoex::sim {

EventHandle Simulator::schedule(SimTime due, Action action) {
  if (due < now_) {
    std::ostringstream msg;
    msg << "cannot schedule event in the past: due " << due << " < now " << now_;
    throw SchedulingError(msg.str());
  }
  EventHandle handle{next_id_++, due, next_sequence_++};
  queue_.push(Entry{handle.due, handle.sequence, handle.id, std::move(action)});
  pending_.insert(handle.id);
  return handle;
}

bool Simulator::cancel(const EventHandle& handle) { return pending_.erase(handle.id) > 0; }

std::uint64_t Simulator::run_until(SimTime end) {
  std::uint64_t count = 0;
  while (!queue_.empty() && queue_.top().due <= end) {
    const Entry& top = queue_.top();
    const std::uint64_t id = top.id;
    const SimTime due = top.due;
    Action action = std::move(top.action);
    queue_.pop();
    if (pending_.erase(id) == 0) continue;  // cancelled
    now_ = due;
    action();
    ++count;
    ++executed_;
  }
  if (end > now_) now_ = end;
  return count;
}

}  // namespace nrucoex::sim
