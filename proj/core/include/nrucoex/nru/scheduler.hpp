#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nrucoex/radio/device.hpp"
#include "nrucoex/sim/time.hpp"

namespace nrucoex::nru {

using radio::DeviceId;
using sim::SimTime;

struct UeDemand {
  DeviceId ue = 0;
  std::uint64_t buffered_bytes = 0;
  std::uint32_t bytes_per_symbol = 1;
  int mcs = 0;
};

struct RetxDemand {
  DeviceId ue = 0;
  std::uint32_t harq_id = 0;
  int symbols = 1;
  int mcs = 0;
  std::uint32_t tb_bytes = 0;
};

struct UeAllocation {
  DeviceId ue = 0;
  int first_symbol = 0;
  int symbols = 0;
  int mcs = 0;
  std::uint32_t tb_bytes = 0;
  bool retransmission = false;
  std::uint32_t harq_id = 0;
};

struct SlotAllocation {
  std::int64_t slot = 0;
  SimTime start;
  std::vector<UeAllocation> ues;
  // Round-robin position for the next slot's new-data pass.
  std::size_t next_rr = 0;

  bool empty() const { return ues.empty(); }
  int used_symbols() const;
  SimTime airtime_end(SimTime symbol) const { return start + symbol * used_symbols(); }
};

/**
 * TDMA symbol allocation for one slot.
 *
 * Retransmissions go first (fixed size, oldest first). New data is then
 * served in round-robin order starting at `rr_start` over `demands`: each UE
 * needs ceil(bytes / bytes_per_symbol) whole symbols; if the total fits every
 * UE gets its need, otherwise symbols are dealt one at a time in RR order
 * (max-min fair) until the slot is full. A UE gets at most one contiguous
 * range per slot, and ranges are laid out back to back from symbol 0.
 */
SlotAllocation schedule_slot(std::int64_t slot, SimTime start, int available_symbols, std::span<const RetxDemand> retx,
                             std::span<const UeDemand> demands, std::size_t rr_start);

}  // namespace nrucoex::nru
