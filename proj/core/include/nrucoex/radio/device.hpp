#pragma once

#include <cstdint>
#include <string_view>

#include "nrucoex/radio/antenna.hpp"
#include "nrucoex/radio/geometry.hpp"

namespace nrucoex::radio {

using DeviceId = std::uint32_t;

enum class Rat { kNrU, kWigig };
enum class Role { kGnb, kUe, kAp, kSta };

constexpr bool is_base_station(Role r) { return r == Role::kGnb || r == Role::kAp; }
constexpr Rat rat_of(Role r) { return (r == Role::kGnb || r == Role::kUe) ? Rat::kNrU : Rat::kWigig; }

std::string_view to_string(Role r);
std::string_view to_string(Rat r);

struct Device {
  DeviceId id = 0;
  int operator_id = 0;
  Role role = Role::kGnb;
  Position position;
  AntennaArray array;
  // Base stations serve themselves.
  DeviceId serving_cell = 0;

  Rat rat() const { return rat_of(role); }
  bool base_station() const { return is_base_station(role); }
};

}  // namespace nrucoex::radio
