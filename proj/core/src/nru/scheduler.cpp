#include "nrucoex/nru/scheduler.hpp"

#include <algorithm>

namespace nrucoex::nru {

int SlotAllocation::used_symbols() const {
  int end = 0;
  for (const auto& u : ues) end = std::max(end, u.first_symbol + u.symbols);
  return end;
}

SlotAllocation schedule_slot(std::int64_t slot, SimTime start, int available_symbols, std::span<const RetxDemand> retx,
                             std::span<const UeDemand> demands, std::size_t rr_start) {
  SlotAllocation out;
  out.slot = slot;
  out.start = start;
  out.next_rr = demands.empty() ? 0 : rr_start % demands.size();
  int free_symbols = std::max(available_symbols, 0);
  int cursor = 0;

  std::vector<DeviceId> served;
  for (const auto& r : retx) {
    if (r.symbols > free_symbols) continue;
    if (std::find(served.begin(), served.end(), r.ue) != served.end()) continue;
    out.ues.push_back({r.ue, cursor, r.symbols, r.mcs, r.tb_bytes, true, r.harq_id});
    served.push_back(r.ue);
    cursor += r.symbols;
    free_symbols -= r.symbols;
  }

  // Candidates for new data in round-robin order.
  const std::size_t n = demands.size();
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = (rr_start + k) % n;
    const auto& d = demands[i];
    if (d.buffered_bytes == 0 || d.bytes_per_symbol == 0) continue;
    if (std::find(served.begin(), served.end(), d.ue) != served.end()) continue;
    order.push_back(i);
  }
  if (order.empty() || free_symbols == 0) return out;

  std::vector<int> need(order.size());
  std::vector<int> given(order.size(), 0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& d = demands[order[k]];
    need[k] = static_cast<int>((d.buffered_bytes + d.bytes_per_symbol - 1) / d.bytes_per_symbol);
  }
  std::size_t last_first_served = order.size();
  bool progress = true;
  while (free_symbols > 0 && progress) {
    progress = false;
    for (std::size_t k = 0; k < order.size() && free_symbols > 0; ++k) {
      if (given[k] >= need[k]) continue;
      if (given[k] == 0) last_first_served = k;
      ++given[k];
      --free_symbols;
      progress = true;
    }
  }
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (given[k] == 0) continue;
    const auto& d = demands[order[k]];
    const std::uint64_t capacity = static_cast<std::uint64_t>(given[k]) * d.bytes_per_symbol;
    const auto tb = static_cast<std::uint32_t>(std::min<std::uint64_t>(d.buffered_bytes, capacity));
    out.ues.push_back({d.ue, cursor, given[k], d.mcs, tb, false, 0});
    cursor += given[k];
  }
  if (last_first_served < order.size()) out.next_rr = (order[last_first_served] + 1) % n;
  return out;
}

}  // namespace nrucoex::nru
