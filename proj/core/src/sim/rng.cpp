#include "nrucoex/sim/rng.hpp"

#include <cmath>
#include <numbers>

namespace nrucoex::sim {

std::uint64_t fnv1a64(std::string_view text, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t campaign_seed, std::string_view component, std::uint64_t device) {
  std::uint64_t k = splitmix64(campaign_seed);
  k = splitmix64(k ^ fnv1a64(component));
  key_ = splitmix64(k ^ splitmix64(device + 0x632be59bd9b4e019ULL));
}

std::uint64_t RngStream::next_u64() {
  // Two rounds of mixing over (key, counter) decorrelate neighbouring keys.
  const std::uint64_t c = counter_++;
  return splitmix64(splitmix64(key_ + c * 0xd1342543de82ef95ULL) ^ key_);
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t RngStream::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  if (hi <= lo) return lo;
  const std::uint64_t span = hi - lo;
  if (span == ~0ULL) return next_u64();
  const std::uint64_t range = span + 1;
  // Rejection sampling keeps the draw unbiased: discard the 2^64 mod range lowest values.
  const std::uint64_t threshold = (0 - range) % range;
  std::uint64_t x = next_u64();
  while (x < threshold) x = next_u64();
  return lo + x % range;
}

double RngStream::normal(double mean, double stddev) {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + stddev * z;
}

}  // namespace nrucoex::sim
