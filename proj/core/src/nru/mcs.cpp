#include "nrucoex/nru/mcs.hpp"

#include <cmath>
#include <stdexcept>

namespace nrucoex::nru {

McsTable::McsTable(std::vector<double> thresholds_db, std::vector<double> efficiencies)
    : thresholds_(std::move(thresholds_db)), efficiencies_(std::move(efficiencies)) {
  if (thresholds_.empty() || thresholds_.size() != efficiencies_.size())
    throw std::invalid_argument("McsTable: thresholds and efficiencies must be non-empty and equal length");
  for (std::size_t i = 1; i < thresholds_.size(); ++i)
    if (!(thresholds_[i] > thresholds_[i - 1])) throw std::invalid_argument("McsTable: thresholds must increase");
}

McsTable McsTable::nr_default() {
  return McsTable({-2, 0, 2, 4, 7, 10, 13, 16, 19, 22, 25, 28},
                  {0.2, 0.35, 0.55, 0.8, 1.15, 1.6, 2.1, 2.7, 3.3, 4.0, 4.75, 5.5});
}

McsTable McsTable::wigig_default() {
  return McsTable({1, 4, 7, 12, 17, 22}, {385, 770, 1155, 1925, 3080, 4620});
}

McsSelection McsTable::select(double sinr_db, double margin_db) const {
  if (std::isnan(sinr_db)) throw std::invalid_argument("McsTable::select: SINR is NaN");
  const double effective = sinr_db - margin_db;
  int best = -1;
  for (std::size_t i = 0; i < thresholds_.size(); ++i)
    if (thresholds_[i] <= effective) best = static_cast<int>(i);
  if (best < 0) return {0, efficiencies_.front(), true};
  return {best, efficiencies_[static_cast<std::size_t>(best)], false};
}

std::uint32_t bytes_per_symbol(double spectral_efficiency, double bandwidth_hz, double overhead, double symbol_seconds) {
  const double bits = spectral_efficiency * bandwidth_hz * overhead * symbol_seconds;
  return static_cast<std::uint32_t>(std::floor(bits / 8.0));
}

}  // namespace nrucoex::nru
