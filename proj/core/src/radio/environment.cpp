#include "nrucoex/radio/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nrucoex/radio/propagation.hpp"
#include "nrucoex/sim/rng.hpp"

namespace nrucoex::radio {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

RadioEnvironment::RadioEnvironment(RadioParams params, std::vector<Device> devices, std::uint64_t seed)
    : params_(params), devices_(std::move(devices)) {
  const std::size_t n = devices_.size();
  links_.resize(n * n);
  for (DeviceId a = 0; a < n; ++a) {
    for (DeviceId b = a + 1; b < n; ++b) {
      LinkState ls;
      ls.distance_2d = distance_2d(devices_[a].position, devices_[b].position);
      ls.distance_3d = distance_3d(devices_[a].position, devices_[b].position);
      sim::RngStream rng(seed, "link", (static_cast<std::uint64_t>(a) << 32) | b);
      ls.los = rng.bernoulli(los_probability(ls.distance_2d));
      ls.pathloss_db = pathloss_db(ls.distance_3d, params_.carrier_frequency_ghz, ls.los);
      const double sigma = ls.los ? params_.shadowing_sigma_los_db : params_.shadowing_sigma_nlos_db;
      ls.shadowing_db = params_.shadowing ? rng.normal(0.0, sigma) : 0.0;
      links_[index(a, b)] = ls;
      links_[index(b, a)] = ls;
    }
  }
  build_tables();
}

RadioEnvironment::RadioEnvironment(RadioParams params, std::vector<Device> devices, std::vector<LinkState> links)
    : params_(params), devices_(std::move(devices)), links_(std::move(links)) {
  if (links_.size() != devices_.size() * devices_.size())
    throw std::invalid_argument("RadioEnvironment: link table must be n*n");
  build_tables();
}

void RadioEnvironment::build_tables() {
  for (std::size_t i = 0; i < devices_.size(); ++i) {
    if (devices_[i].id != i) throw std::invalid_argument("RadioEnvironment: device ids must be dense and ordered");
  }
  noise_dbm_ = noise_power_dbm(params_.bandwidth_hz, params_.noise_figure_db, params_.noise_psd_dbm_hz);
  const std::size_t n = devices_.size();
  gain_table_.assign(n * n * n, 0.0);
  for (DeviceId d = 0; d < n; ++d) {
    for (DeviceId s = 0; s < n; ++s) {
      if (s == d) continue;
      AntennaArray array = devices_[d].array;
      const Vec3 aim = direction(devices_[d].position, devices_[s].position);
      array.set_boresight(aim);
      array.steer(aim);
      for (DeviceId t = 0; t < n; ++t) {
        if (t == d) continue;
        gain_table_[(static_cast<std::size_t>(d) * n + s) * n + t] =
            array.gain_db(direction(devices_[d].position, devices_[t].position));
      }
    }
  }
}

double RadioEnvironment::gain_db(DeviceId dev, DeviceId steer, DeviceId target) const {
  const std::size_t n = devices_.size();
  return gain_table_[(static_cast<std::size_t>(dev) * n + steer) * n + target];
}

double RadioEnvironment::rx_gain_db(DeviceId rx, const RxBeam& beam, DeviceId source) const {
  if (!beam.steer || *beam.steer == rx) return 0.0;
  return gain_db(rx, *beam.steer, source);
}

double RadioEnvironment::tx_gain_db(const Emission& e, DeviceId rx) const {
  if (!e.beam_target || *e.beam_target == e.source) return 0.0;
  return gain_db(e.source, *e.beam_target, rx);
}

double RadioEnvironment::rx_power_dbm(const Emission& e, DeviceId rx, const RxBeam& beam) const {
  if (rx == e.source) return kNegInf;
  return e.tx_power_dbm + tx_gain_db(e, rx) + rx_gain_db(rx, beam, e.source) - link(e.source, rx).total_loss_db();
}

double RadioEnvironment::aligned_rx_power_dbm(DeviceId tx, DeviceId rx) const {
  return params_.max_tx_power_dbm + gain_db(tx, rx, rx) + gain_db(rx, tx, tx) - link(tx, rx).total_loss_db();
}

double RadioEnvironment::snr_db(DeviceId tx, DeviceId rx, const RxBeam& rx_beam) const {
  return params_.max_tx_power_dbm + gain_db(tx, rx, rx) + rx_gain_db(rx, rx_beam, tx) - link(tx, rx).total_loss_db() -
         noise_dbm_;
}

const Emission& RadioEnvironment::add_emission(Emission e) {
  if (!(e.end > e.start)) throw std::invalid_argument("emission must have positive duration");
  if (e.tx_power_dbm > params_.max_tx_power_dbm + 1e-9) throw std::invalid_argument("emission exceeds power limit");
  if (!emissions_.empty() && e.start < last_start_)
    throw std::logic_error("emissions must be registered in start order");
  e.id = next_emission_id_++;
  last_start_ = e.start;
  max_duration_ = std::max(max_duration_, e.duration());
  emissions_.push_back(e);
  return emissions_.back();
}

std::vector<const Emission*> RadioEnvironment::overlapping(SimTime a, SimTime b) const {
  std::vector<const Emission*> out;
  if (emissions_.empty()) return out;
  auto it = std::partition_point(emissions_.begin(), emissions_.end(), [&](const Emission& e) { return e.start < b; });
  const SimTime floor = a.ticks() > max_duration_.ticks() ? a - max_duration_ : SimTime::zero();
  while (it != emissions_.begin()) {
    --it;
    if (it->start < floor) break;
    if (it->end > a) out.push_back(&*it);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

bool RadioEnvironment::transmitting(DeviceId dev, SimTime a, SimTime b) const {
  for (const Emission* e : overlapping(a, b))
    if (e->source == dev) return true;
  return false;
}

void RadioEnvironment::prune(SimTime before) {
  if (retain_) return;
  while (!emissions_.empty() && emissions_.front().end < before) emissions_.pop_front();
}

double RadioEnvironment::sinr_db(DeviceId rx, const Emission& signal, const RxBeam& beam) const {
  const double s_mw = dbm_to_mw(rx_power_dbm(signal, rx, beam));
  const double n_mw = dbm_to_mw(noise_dbm_);
  struct Interferer {
    SimTime start, end;
    double mw;
  };
  std::vector<Interferer> interferers;
  std::vector<SimTime> cuts{signal.start, signal.end};
  for (const Emission* e : overlapping(signal.start, signal.end)) {
    if (e->id == signal.id || e->source == rx) continue;
    if (signal.orthogonal_group >= 0 && e->orthogonal_group == signal.orthogonal_group) continue;
    const SimTime s = std::max(e->start, signal.start);
    const SimTime t = std::min(e->end, signal.end);
    interferers.push_back({s, t, dbm_to_mw(rx_power_dbm(*e, rx, beam))});
    cuts.push_back(s);
    cuts.push_back(t);
  }
  if (interferers.empty()) return linear_to_db(s_mw / n_mw);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double weighted = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const SimTime lo = cuts[i];
    const SimTime hi = cuts[i + 1];
    double i_mw = 0.0;
    for (const auto& it : interferers)
      if (it.start <= lo && it.end >= hi) i_mw += it.mw;
    weighted += static_cast<double>((hi - lo).ticks()) * s_mw / (n_mw + i_mw);
  }
  return linear_to_db(weighted / static_cast<double>(signal.duration().ticks()));
}

double RadioEnvironment::sinr_db(DeviceId rx, const Emission& signal, const RxBeam& beam, SimTime t) const {
  double i_mw = 0.0;
  for (const Emission* e : overlapping(t, t + SimTime::ns(1))) {
    if (e->id == signal.id || e->source == rx) continue;
    if (signal.orthogonal_group >= 0 && e->orthogonal_group == signal.orthogonal_group) continue;
    i_mw += dbm_to_mw(rx_power_dbm(*e, rx, beam));
  }
  return linear_to_db(dbm_to_mw(rx_power_dbm(signal, rx, beam)) / (dbm_to_mw(noise_dbm_) + i_mw));
}

bool RadioEnvironment::sensed(DeviceId sensor, const SensingRule& rule, const Emission& e) const {
  if (e.source == sensor) return false;
  if (rule.exclude_own_cell && e.cell == devices_[sensor].serving_cell) return false;
  return true;
}

template <typename Fn>
void RadioEnvironment::sweep(DeviceId sensor, const SensingRule& rule, SimTime a, SimTime b, Fn&& on_segment) const {
  struct Item {
    SimTime start, end;
    double mw;
    bool preamble;
  };
  std::vector<Item> items;
  std::vector<SimTime> cuts{a, b};
  for (const Emission* e : overlapping(a, b)) {
    if (!sensed(sensor, rule, *e)) continue;
    const double dbm = rx_power_dbm(*e, sensor, rule.beam);
    const bool preamble = rule.preamble_threshold_dbm && e->rat == Rat::kWigig && dbm >= *rule.preamble_threshold_dbm;
    const SimTime s = std::max(e->start, a);
    const SimTime t = std::min(e->end, b);
    items.push_back({s, t, dbm_to_mw(dbm), preamble});
    cuts.push_back(s);
    cuts.push_back(t);
  }
  if (items.empty()) {
    on_segment(a, b, 0.0, false);
    return;
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const double ed_mw = dbm_to_mw(rule.ed_threshold_dbm);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const SimTime lo = cuts[i];
    const SimTime hi = cuts[i + 1];
    double sum = 0.0;
    bool preamble = false;
    for (const auto& it : items) {
      if (it.start <= lo && it.end >= hi) {
        sum += it.mw;
        preamble = preamble || it.preamble;
      }
    }
    if (!on_segment(lo, hi, sum, preamble || sum >= ed_mw)) return;
  }
}

double RadioEnvironment::max_sensed_power_dbm(DeviceId sensor, const SensingRule& rule, SimTime a, SimTime b) const {
  double best = 0.0;
  sweep(sensor, rule, a, b, [&](SimTime, SimTime, double mw, bool) {
    best = std::max(best, mw);
    return true;
  });
  return mw_to_dbm(best);
}

bool RadioEnvironment::busy(DeviceId sensor, const SensingRule& rule, SimTime a, SimTime b) const {
  bool result = false;
  sweep(sensor, rule, a, b, [&](SimTime, SimTime, double, bool busy_segment) {
    result = busy_segment;
    return !busy_segment;
  });
  return result;
}

SimTime RadioEnvironment::busy_until(DeviceId sensor, const SensingRule& rule, SimTime from) const {
  SimTime last_end = from;
  for (const Emission* e : overlapping(from, SimTime::infinity()))
    if (sensed(sensor, rule, *e)) last_end = std::max(last_end, e->end);
  if (last_end == from) return from;
  SimTime result = from;
  sweep(sensor, rule, from, last_end, [&](SimTime, SimTime hi, double, bool busy_segment) {
    if (busy_segment) result = hi;
    return true;
  });
  return result;
}

}  // namespace nrucoex::radio
