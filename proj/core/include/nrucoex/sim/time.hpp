#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>

namespace nrucoex::sim {

// Integer nanoseconds since run start. Also used for durations.
class SimTime {
 public:
  constexpr SimTime() = default;

  static constexpr SimTime ns(std::int64_t v) { return SimTime{v}; }
  static constexpr SimTime us(std::int64_t v) { return SimTime{v * 1'000}; }
  static constexpr SimTime ms(std::int64_t v) { return SimTime{v * 1'000'000}; }
  static constexpr SimTime s(std::int64_t v) { return SimTime{v * 1'000'000'000}; }
  static constexpr SimTime zero() { return SimTime{0}; }
  // Used as the deadline of unbounded grants.
  static constexpr SimTime infinity() { return SimTime{std::numeric_limits<std::int64_t>::max()}; }

  constexpr std::int64_t ticks() const { return ticks_; }
  constexpr double to_us() const { return static_cast<double>(ticks_) / 1e3; }
  constexpr double to_seconds() const { return static_cast<double>(ticks_) / 1e9; }
  constexpr bool is_infinite() const { return ticks_ == std::numeric_limits<std::int64_t>::max(); }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(SimTime o) const {
    if (is_infinite() || o.is_infinite()) return infinity();
    return SimTime{ticks_ + o.ticks_};
  }
  constexpr SimTime operator-(SimTime o) const { return SimTime{ticks_ - o.ticks_}; }
  constexpr SimTime& operator+=(SimTime o) { return *this = *this + o; }
  constexpr SimTime& operator-=(SimTime o) { return *this = *this - o; }
  constexpr SimTime operator*(std::int64_t k) const { return SimTime{ticks_ * k}; }
  constexpr std::int64_t operator/(SimTime o) const { return ticks_ / o.ticks_; }
  constexpr SimTime operator%(SimTime o) const { return SimTime{ticks_ % o.ticks_}; }

 private:
  constexpr explicit SimTime(std::int64_t t) : ticks_(t) {}
  std::int64_t ticks_ = 0;
};

constexpr SimTime operator*(std::int64_t k, SimTime t) { return t * k; }

inline std::ostream& operator<<(std::ostream& os, SimTime t) {
  if (t.is_infinite()) return os << "inf";
  return os << t.ticks() << "ns";
}

}  // namespace nrucoex::sim
