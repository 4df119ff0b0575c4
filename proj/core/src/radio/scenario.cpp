#include "nrucoex/radio/scenario.hpp"

#include <limits>
#include <ostream>
#include <stdexcept>

#include "nrucoex/sim/rng.hpp"

namespace nrucoex::radio {

std::vector<Position> site_positions(const ScenarioParams& p, int operator_id) {
  const double y = p.floor_y_m * (operator_id == 0 ? 1.0 : 2.0) / 3.0;
  std::vector<Position> sites;
  if (p.sites_per_operator == 1) {
    sites.push_back({p.floor_x_m / 2.0, y, p.bs_height_m});
    return sites;
  }
  for (int i = 0; i < p.sites_per_operator; ++i) {
    const double x = p.floor_x_m * (2.0 * i + 1.0) / (2.0 * p.sites_per_operator);
    sites.push_back({x, y, p.bs_height_m});
  }
  return sites;
}

std::vector<Device> drop_devices(const ScenarioParams& p, std::uint64_t seed) {
  if (p.sites_per_operator < 1) throw std::invalid_argument("scenario: at least one site per operator");
  std::vector<Device> devices;
  for (int op = 0; op < 2; ++op) {
    const Rat rat = p.operator_rat[op];
    const auto sites = site_positions(p, op);
    for (const auto& pos : sites) {
      Device d;
      d.id = static_cast<DeviceId>(devices.size());
      d.operator_id = op;
      d.role = rat == Rat::kNrU ? Role::kGnb : Role::kAp;
      d.position = pos;
      d.array = AntennaArray(p.bs_rows, p.bs_cols, p.element_gain_dbi);
      d.serving_cell = d.id;
      devices.push_back(d);
    }
    sim::RngStream rng(seed, "drop", static_cast<std::uint64_t>(op));
    for (int u = 0; u < p.users_per_operator; ++u) {
      Position pos;
      for (;;) {
        pos = {rng.uniform() * p.floor_x_m, rng.uniform() * p.floor_y_m, p.user_height_m};
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& s : sites) nearest = std::min(nearest, distance_2d(pos, s));
        if (nearest <= p.max_user_distance_m) break;
      }
      Device d;
      d.id = static_cast<DeviceId>(devices.size());
      d.operator_id = op;
      d.role = rat == Rat::kNrU ? Role::kUe : Role::kSta;
      d.position = pos;
      d.array = AntennaArray(p.user_rows, p.user_cols, p.element_gain_dbi);
      d.serving_cell = d.id;
      devices.push_back(d);
    }
  }
  return devices;
}

DeviceId select_serving_cell(const RadioEnvironment& env, DeviceId user) {
  const Device& u = env.device(user);
  DeviceId best = user;
  double best_dbm = -std::numeric_limits<double>::infinity();
  for (const Device& d : env.devices()) {
    if (!d.base_station() || d.operator_id != u.operator_id) continue;
    const double p = env.aligned_rx_power_dbm(d.id, user);
    if (p > best_dbm) {
      best_dbm = p;
      best = d.id;
    }
  }
  return best;
}

RadioEnvironment build_environment(const ScenarioParams& p, const RadioParams& radio, std::uint64_t seed) {
  auto devices = drop_devices(p, seed);
  RadioEnvironment draft(radio, devices, seed);
  for (auto& d : devices) {
    if (!d.base_station()) d.serving_cell = select_serving_cell(draft, d.id);
  }
  // Same seed, same link draws: links depend only on (seed, pair), not on serving cells.
  return RadioEnvironment(radio, std::move(devices), seed);
}

void write_scenario_csv(std::ostream& os, const RadioEnvironment& env) {
  os << "device_id,operator,role,x,y,z,serving_cell\n";
  for (const Device& d : env.devices()) {
    os << d.id << ',' << (d.operator_id == 0 ? 'A' : 'B') << ',' << to_string(d.role) << ',' << d.position.x << ','
       << d.position.y << ',' << d.position.z << ',' << d.serving_cell << '\n';
  }
}

}  // namespace nrucoex::radio
