#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "nrucoex/radio/device.hpp"
#include "nrucoex/sim/time.hpp"

namespace nrucoex::radio {

using sim::SimTime;

struct RadioParams {
  double carrier_frequency_ghz = 58.0;
  double bandwidth_hz = 2.16e9;
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 7.0;
  double max_tx_power_dbm = 17.0;
  double shadowing_sigma_los_db = 3.0;
  double shadowing_sigma_nlos_db = 8.03;
  bool shadowing = true;
};

// Drawn once per unordered device pair per run.
struct LinkState {
  bool los = true;
  double shadowing_db = 0.0;
  double distance_2d = 0.0;
  double distance_3d = 0.0;
  double pathloss_db = 0.0;  // without shadowing

  double total_loss_db() const { return pathloss_db + shadowing_db; }
};

enum class EmissionKind { kNrData, kNrFeedback, kWigigData, kWigigAck, kWigigProbe, kWigigProbeResponse };

struct Emission {
  std::uint64_t id = 0;
  DeviceId source = 0;
  // Transmit beam steered toward this device; empty means omnidirectional (0 dB).
  std::optional<DeviceId> beam_target;
  double tx_power_dbm = 17.0;
  SimTime start;
  SimTime end;
  Rat rat = Rat::kNrU;
  EmissionKind kind = EmissionKind::kNrData;
  DeviceId cell = 0;
  // Emissions sharing a non-negative group are mutually orthogonal (multiplexed).
  std::int64_t orthogonal_group = -1;
  std::uint64_t payload = 0;

  SimTime duration() const { return end - start; }
};

struct RxBeam {
  std::optional<DeviceId> steer;
  static RxBeam omni() { return {}; }
  static RxBeam toward(DeviceId d) { return RxBeam{d}; }
};

struct SensingRule {
  double ed_threshold_dbm = -79.0;
  // When set, any single WiGig emission at or above this level is detected by its preamble.
  std::optional<double> preamble_threshold_dbm;
  RxBeam beam;
  // Ignore emissions of the sensor's own cell (shared COT, intra-cell schedule known).
  bool exclude_own_cell = false;
};

/**
 * Scenario geometry, link states, beam gains and the on-air emission log.
 *
 * Beam steering is restricted to device directions, so gains are tabulated:
 * gain_db(d, s, t) is device d's gain toward t with its panel and weights
 * pointed at s (multi-panel devices select the panel facing the target).
 * Emissions must be registered in non-decreasing start order.
 */
class RadioEnvironment {
 public:
  RadioEnvironment(RadioParams params, std::vector<Device> devices, std::uint64_t seed);
  // Uses the provided link states (row-major n*n, symmetric) instead of drawing them.
  RadioEnvironment(RadioParams params, std::vector<Device> devices, std::vector<LinkState> links);

  const RadioParams& params() const { return params_; }
  std::size_t size() const { return devices_.size(); }
  const Device& device(DeviceId id) const { return devices_.at(id); }
  std::span<const Device> devices() const { return devices_; }

  const LinkState& link(DeviceId a, DeviceId b) const { return links_[index(a, b)]; }
  double gain_db(DeviceId dev, DeviceId steer, DeviceId target) const;
  double rx_gain_db(DeviceId rx, const RxBeam& beam, DeviceId source) const;
  double tx_gain_db(const Emission& e, DeviceId rx) const;
  double rx_power_dbm(const Emission& e, DeviceId rx, const RxBeam& beam) const;
  // Aligned-beam received power without interference; used for link adaptation and cell selection.
  double aligned_rx_power_dbm(DeviceId tx, DeviceId rx) const;
  double snr_db(DeviceId tx, DeviceId rx, const RxBeam& rx_beam) const;
  double noise_dbm() const { return noise_dbm_; }

  const Emission& add_emission(Emission e);
  std::vector<const Emission*> overlapping(SimTime a, SimTime b) const;
  bool transmitting(DeviceId dev, SimTime a, SimTime b) const;
  // Drop emissions that ended before `before` (unless retention is enabled).
  void prune(SimTime before);
  void retain_history(bool on) { retain_ = on; }
  const std::deque<Emission>& emissions() const { return emissions_; }
  std::uint64_t emission_count() const { return next_emission_id_ - 1; }

  // Duration-weighted linear mean SINR of `signal` at `rx` over the signal's airtime.
  double sinr_db(DeviceId rx, const Emission& signal, const RxBeam& beam) const;
  double sinr_db(DeviceId rx, const Emission& signal, const RxBeam& beam, SimTime t) const;

  double max_sensed_power_dbm(DeviceId sensor, const SensingRule& rule, SimTime a, SimTime b) const;
  bool busy(DeviceId sensor, const SensingRule& rule, SimTime a, SimTime b) const;
  // First time >= from after which the medium stays idle given the emissions known so far.
  SimTime busy_until(DeviceId sensor, const SensingRule& rule, SimTime from) const;

 private:
  std::size_t index(DeviceId a, DeviceId b) const { return static_cast<std::size_t>(a) * devices_.size() + b; }
  void build_tables();
  bool sensed(DeviceId sensor, const SensingRule& rule, const Emission& e) const;
  // Power samples over [a, b) as (segment start, segment end, busy) decided by the rule.
  template <typename Fn>
  void sweep(DeviceId sensor, const SensingRule& rule, SimTime a, SimTime b, Fn&& on_segment) const;

  RadioParams params_;
  std::vector<Device> devices_;
  std::vector<LinkState> links_;
  std::vector<double> gain_table_;
  double noise_dbm_ = 0.0;

  std::deque<Emission> emissions_;
  SimTime max_duration_;
  SimTime last_start_;
  std::uint64_t next_emission_id_ = 1;
  bool retain_ = false;
};

}  // namespace nrucoex::radio
