#pragma once

#include <cmath>

namespace nrucoex::radio {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double k) const { return {x * k, y * k, z * k}; }
  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{1.0, 0.0, 0.0};
  }
  constexpr bool operator==(const Vec3&) const = default;
};

// Meters, floor coordinates.
using Position = Vec3;

inline double distance_3d(const Position& a, const Position& b) { return (b - a).norm(); }
inline double distance_2d(const Position& a, const Position& b) { return std::hypot(b.x - a.x, b.y - a.y); }

// Unit vector pointing from `from` toward `to`.
inline Vec3 direction(const Position& from, const Position& to) { return (to - from).normalized(); }

// Azimuth measured from +x toward +y, elevation above the horizontal plane; radians.
inline Vec3 direction_from_angles(double azimuth, double elevation) {
  return {std::cos(elevation) * std::cos(azimuth), std::cos(elevation) * std::sin(azimuth), std::sin(elevation)};
}

}  // namespace nrucoex::radio
