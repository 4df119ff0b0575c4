#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "nrucoex/sim/time.hpp"

namespace nrucoex::metrics {

using sim::SimTime;

// Union of on-air intervals for one operator; overlaps are counted once.
class OccupancyLedger {
 public:
  // Precondition end > start; empty intervals are ignored.
  void record(SimTime start, SimTime end);

  SimTime union_length() const { return total_; }
  // Occupied time within [a, b).
  SimTime occupied_within(SimTime a, SimTime b) const;
  std::size_t interval_count() const { return intervals_.size(); }
  std::vector<std::pair<SimTime, SimTime>> intervals() const;

 private:
  std::map<SimTime, SimTime> intervals_;  // start -> end, disjoint, sorted
  SimTime total_;
};

double occupancy_fraction(const OccupancyLedger& ledger, SimTime t_end);

struct BoxStats {
  double min = 0.0;
  double p5 = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double max = 0.0;
};

// Nearest-rank percentile: the ceil(p/100 * n)-th smallest sample.
double nearest_rank(std::span<const double> sorted, double percent);
// Throws std::invalid_argument on an empty sample set.
BoxStats box_stats(std::span<const double> samples);

double mean(std::span<const double> samples);
// Sample (n - 1) standard deviation; 0 for fewer than two samples.
double sample_stddev(std::span<const double> samples);

}  // namespace nrucoex::metrics
