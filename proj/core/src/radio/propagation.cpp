#include "nrucoex/radio/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nrucoex::radio {

double los_probability(double d2d) {
  if (!(d2d >= 0.0)) throw std::invalid_argument("los_probability: negative distance");
  if (d2d <= 5.0) return 1.0;
  if (d2d <= 49.0) return std::exp(-(d2d - 5.0) / 70.8);
  return 0.54 * std::exp(-(d2d - 49.0) / 211.7);
}

double pathloss_los_db(double d3d, double fc_ghz) {
  const double d = std::max(d3d, 1.0);
  return 32.4 + 17.3 * std::log10(d) + 20.0 * std::log10(fc_ghz);
}

double pathloss_nlos_db(double d3d, double fc_ghz) {
  const double d = std::max(d3d, 1.0);
  const double nlos = 17.3 + 38.3 * std::log10(d) + 24.9 * std::log10(fc_ghz);
  return std::max(pathloss_los_db(d, fc_ghz), nlos);
}

double pathloss_db(double d3d, double fc_ghz, bool los) {
  return los ? pathloss_los_db(d3d, fc_ghz) : pathloss_nlos_db(d3d, fc_ghz);
}

double noise_power_dbm(double bandwidth_hz, double noise_figure_db, double noise_psd_dbm_hz) {
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("noise_power_dbm: bandwidth must be positive");
  return noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw) {
  if (mw <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(mw);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return mw_to_dbm(linear); }

}  // namespace nrucoex::radio
