#include "nrucoex/radio/antenna.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace nrucoex::radio {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// |sum_{k<n} exp(j*pi*k*x)|^2
double linear_array_power(int n, double x) {
  std::complex<double> acc{0.0, 0.0};
  for (int k = 0; k < n; ++k) acc += std::polar(1.0, std::numbers::pi * k * x);
  return std::norm(acc);
}

}  // namespace

double tr38901_element_attenuation_db(double azimuth_deg, double zenith_deg) {
  const double a_h = -std::min(12.0 * std::pow(azimuth_deg / 65.0, 2.0), 30.0);
  const double a_v = -std::min(12.0 * std::pow((zenith_deg - 90.0) / 65.0, 2.0), 30.0);
  return -std::min(-(a_h + a_v), 30.0);
}

AntennaArray::AntennaArray(int rows, int cols, double element_gain_dbi, ElementPattern pattern)
    : rows_(rows), cols_(cols), element_gain_dbi_(element_gain_dbi), pattern_(pattern) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("AntennaArray: element counts must be positive");
  set_boresight(Vec3{1.0, 0.0, 0.0});
}

void AntennaArray::set_boresight(const Vec3& direction) {
  normal_ = direction.normalized();
  // Horizontal axis lies in the floor plane; for a vertical boresight pick +y.
  Vec3 h{-normal_.y, normal_.x, 0.0};
  if (h.norm() < 1e-9) h = Vec3{0.0, 1.0, 0.0};
  h_axis_ = h.normalized();
  // v = n x h
  v_axis_ = Vec3{normal_.y * h_axis_.z - normal_.z * h_axis_.y, normal_.z * h_axis_.x - normal_.x * h_axis_.z,
                 normal_.x * h_axis_.y - normal_.y * h_axis_.x}
                .normalized();
}

double AntennaArray::array_factor_db(const Vec3& target) const {
  const Vec3 delta = target.normalized() - steering_;
  // Separable: rows along the vertical axis, columns along the horizontal axis.
  const double p_cols = linear_array_power(cols_, h_axis_.dot(delta));
  const double p_rows = linear_array_power(rows_, v_axis_.dot(delta));
  const double af = p_cols * p_rows / static_cast<double>(elements());
  return 10.0 * std::log10(std::max(af, 1e-30));
}

double AntennaArray::element_gain_db(const Vec3& target) const {
  if (pattern_ == ElementPattern::kIsotropic) return element_gain_dbi_;
  const Vec3 u = target.normalized();
  const double x = normal_.dot(u);
  const double y = h_axis_.dot(u);
  const double z = std::clamp(v_axis_.dot(u), -1.0, 1.0);
  const double azimuth = std::atan2(y, x) * kRadToDeg;
  const double zenith = std::acos(z) * kRadToDeg;
  return element_gain_dbi_ + tr38901_element_attenuation_db(azimuth, zenith);
}

double AntennaArray::peak_array_factor_db() const { return 10.0 * std::log10(static_cast<double>(elements())); }

double beam_gain_db(AntennaArray array, const Vec3& steering, const Vec3& target) {
  array.steer(steering);
  return array.gain_db(target);
}

}  // namespace nrucoex::radio
