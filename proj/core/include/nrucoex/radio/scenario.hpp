#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nrucoex/radio/device.hpp"
#include "nrucoex/radio/environment.hpp"

namespace nrucoex::radio {

struct ScenarioParams {
  double floor_x_m = 60.0;
  double floor_y_m = 20.0;
  int sites_per_operator = 3;  // 3 = full floor layout, 1 = reduced (middle sites only)
  int users_per_operator = 12;
  double bs_height_m = 3.0;
  double user_height_m = 1.5;
  double max_user_distance_m = 20.0;
  int bs_rows = 8, bs_cols = 8;
  int user_rows = 4, user_cols = 4;
  double element_gain_dbi = 8.0;
  std::array<Rat, 2> operator_rat{Rat::kNrU, Rat::kWigig};
};

// Two rows of sites: operator 0 at y = floor/3, operator 1 at y = 2*floor/3.
std::vector<Position> site_positions(const ScenarioParams& p, int operator_id);

// Places base stations and drops users; serving cells are left unassigned (== own id).
std::vector<Device> drop_devices(const ScenarioParams& p, std::uint64_t seed);

// Strongest aligned-beam received power among the user's own-operator base stations.
DeviceId select_serving_cell(const RadioEnvironment& env, DeviceId user);

// Full build: drop, draw links, attach every user to its serving cell.
RadioEnvironment build_environment(const ScenarioParams& p, const RadioParams& radio, std::uint64_t seed);

// device_id,operator,role,x,y,z,serving_cell
void write_scenario_csv(std::ostream& os, const RadioEnvironment& env);

}  // namespace nrucoex::radio
