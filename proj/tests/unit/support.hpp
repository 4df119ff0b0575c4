#pragma once

#include <functional>
#include <vector>

#include "nrucoex/radio/environment.hpp"
#include "nrucoex/radio/propagation.hpp"

namespace testsupport {

using namespace nrucoex;

inline radio::Device device(radio::DeviceId id, radio::Role role, radio::Position pos, radio::AntennaArray array,
                            radio::DeviceId serving, int op = 0) {
  radio::Device d;
  d.id = id;
  d.role = role;
  d.position = pos;
  d.array = array;
  d.serving_cell = serving;
  d.operator_id = op;
  return d;
}

// Single isotropic element with 0 dBi gain.
inline radio::AntennaArray toy_antenna() { return radio::AntennaArray(1, 1, 0.0, radio::ElementPattern::kIsotropic); }

// Link table from an explicit loss function; shadowing is zero.
inline std::vector<radio::LinkState> links_from(const std::vector<radio::Device>& devs,
                                               const std::function<double(radio::DeviceId, radio::DeviceId)>& loss) {
  const std::size_t n = devs.size();
  std::vector<radio::LinkState> links(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      auto& l = links[a * n + b];
      l.los = true;
      l.distance_2d = radio::distance_2d(devs[a].position, devs[b].position);
      l.distance_3d = radio::distance_3d(devs[a].position, devs[b].position);
      const auto lo = static_cast<radio::DeviceId>(std::min(a, b));
      const auto hi = static_cast<radio::DeviceId>(std::max(a, b));
      l.pathloss_db = loss(lo, hi);
    }
  }
  return links;
}

// Every link line of sight at the device distances, no shadowing.
inline std::vector<radio::LinkState> los_links(const std::vector<radio::Device>& devs, double fc_ghz = 58.0) {
  return links_from(devs, [&](radio::DeviceId a, radio::DeviceId b) {
    return radio::pathloss_los_db(radio::distance_3d(devs[a].position, devs[b].position), fc_ghz);
  });
}

inline radio::Emission emission(radio::DeviceId src, sim::SimTime start, sim::SimTime end, radio::Rat rat,
                                std::optional<radio::DeviceId> beam = std::nullopt, double power = 17.0) {
  radio::Emission e;
  e.source = src;
  e.start = start;
  e.end = end;
  e.rat = rat;
  e.kind = rat == radio::Rat::kNrU ? radio::EmissionKind::kNrData : radio::EmissionKind::kWigigData;
  e.beam_target = beam;
  e.tx_power_dbm = power;
  e.cell = src;
  return e;
}

}  // namespace testsupport
