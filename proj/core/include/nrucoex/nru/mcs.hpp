#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace nrucoex::nru {

struct McsSelection {
  int index = 0;
  double spectral_efficiency = 0.0;  // bit/s/Hz for NR-U, Mbit/s for WiGig tables
  bool outage = false;
};

/**
 * Threshold table for adaptive MCS. Selection picks the highest entry whose
 * decode threshold is <= sinr - margin (a tie selects that entry); below the
 * lowest threshold the lowest entry is returned with the outage flag set.
 */
class McsTable {
 public:
  McsTable(std::vector<double> thresholds_db, std::vector<double> efficiencies);

  static McsTable nr_default();
  static McsTable wigig_default();

  std::size_t size() const { return thresholds_.size(); }
  double threshold_db(int index) const { return thresholds_.at(static_cast<std::size_t>(index)); }
  double efficiency(int index) const { return efficiencies_.at(static_cast<std::size_t>(index)); }
  std::span<const double> thresholds() const { return thresholds_; }

  McsSelection select(double sinr_db, double margin_db = 1.0) const;

 private:
  std::vector<double> thresholds_;
  std::vector<double> efficiencies_;
};

// Transport-block capacity of one full-bandwidth OFDM symbol.
std::uint32_t bytes_per_symbol(double spectral_efficiency, double bandwidth_hz, double overhead, double symbol_seconds);

}  // namespace nrucoex::nru
