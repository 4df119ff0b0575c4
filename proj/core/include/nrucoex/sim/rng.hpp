#pragma once

#include <cstdint>
#include <string_view>

namespace nrucoex::sim {

/**
 * Counter-based random stream keyed by (campaign seed, component, device).
 *
 * Draw i is a pure function of (key, i), so streams share no state and the
 * sequence is identical on every platform. Distributions are implemented
 * here rather than with <random> distributions, whose outputs are
 * implementation-defined.
 */
class RngStream {
 public:
  RngStream(std::uint64_t campaign_seed, std::string_view component, std::uint64_t device);

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  // Uniform integer on the closed range [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  double normal(double mean, double stddev);
  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t key() const { return key_; }
  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t fnv1a64(std::string_view text, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace nrucoex::sim
