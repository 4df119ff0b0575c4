#pragma once

#include "nrucoex/sim/time.hpp"

namespace nrucoex::nru {

using sim::SimTime;

// 120 kHz numerology. The slot is exactly 14 symbols (124.88 us) so that every
// NR-U emission is a whole number of 8.92 us symbols.
struct Numerology {
  int scs_khz = 120;
  SimTime symbol = SimTime::ns(8920);
  int symbols_per_slot = 14;

  SimTime slot() const { return symbol * symbols_per_slot; }
  SimTime slot_start(std::int64_t slot_index) const { return slot() * slot_index; }
  SimTime symbol_start(std::int64_t slot_index, int symbol_index) const {
    return slot_start(slot_index) + symbol * symbol_index;
  }
};

}  // namespace nrucoex::nru
