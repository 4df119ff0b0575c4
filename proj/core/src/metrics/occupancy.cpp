#include "nrucoex/metrics/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nrucoex::metrics {

void OccupancyLedger::record(SimTime start, SimTime end) {
  if (!(end > start)) return;
  // First interval that could touch [start, end): the one starting at or before start.
  auto it = intervals_.upper_bound(start);
  if (it != intervals_.begin()) {
    auto prev = std::prev(it);
    if (prev->second >= start) it = prev;
  }
  SimTime lo = start;
  SimTime hi = end;
  while (it != intervals_.end() && it->first <= hi) {
    lo = std::min(lo, it->first);
    hi = std::max(hi, it->second);
    total_ -= it->second - it->first;
    it = intervals_.erase(it);
  }
  intervals_.emplace(lo, hi);
  total_ += hi - lo;
}

SimTime OccupancyLedger::occupied_within(SimTime a, SimTime b) const {
  SimTime sum;
  auto it = intervals_.upper_bound(a);
  if (it != intervals_.begin()) --it;
  for (; it != intervals_.end() && it->first < b; ++it) {
    const SimTime lo = std::max(a, it->first);
    const SimTime hi = std::min(b, it->second);
    if (hi > lo) sum += hi - lo;
  }
  return sum;
}

std::vector<std::pair<SimTime, SimTime>> OccupancyLedger::intervals() const {
  return {intervals_.begin(), intervals_.end()};
}

double occupancy_fraction(const OccupancyLedger& ledger, SimTime t_end) {
  if (t_end <= SimTime::zero()) return 0.0;
  const double f = static_cast<double>(ledger.occupied_within(SimTime::zero(), t_end).ticks()) /
                   static_cast<double>(t_end.ticks());
  return std::clamp(f, 0.0, 1.0);
}

double nearest_rank(std::span<const double> sorted, double percent) {
  if (sorted.empty()) throw std::invalid_argument("nearest_rank: empty sample set");
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(percent / 100.0 * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

BoxStats box_stats(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("box_stats: empty sample set");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  return {s.front(), nearest_rank(s, 5.0), nearest_rank(s, 50.0), nearest_rank(s, 95.0), s.back()};
}

double mean(std::span<const double> samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (double v : samples) sum += v;
  return sum / static_cast<double>(samples.size());
}

double sample_stddev(std::span<const double> samples) {
  if (samples.size() < 2) return 0.0;
  const double m = mean(samples);
  double acc = 0.0;
  for (double v : samples) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(samples.size() - 1));
}

}  // namespace nrucoex::metrics
