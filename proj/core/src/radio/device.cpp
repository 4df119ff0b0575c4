#include "nrucoex/radio/device.hpp"

namespace nrucoex::radio {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::kGnb: return "gNB";
    case Role::kUe: return "UE";
    case Role::kAp: return "AP";
    case Role::kSta: return "STA";
  }
  return "?";
}

std::string_view to_string(Rat r) { return r == Rat::kNrU ? "NR-U" : "WiGig"; }

}  // namespace nrucoex::radio
