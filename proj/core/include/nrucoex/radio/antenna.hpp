#pragma once

#include "nrucoex/radio/geometry.hpp"

namespace nrucoex::radio {

enum class ElementPattern {
  kIsotropic,
  // Parabolic element of 3GPP TR 38.901: 65 deg HPBW in both planes, 30 dB floor.
  kTr38901,
};

/**
 * Uniform planar array with half-wavelength spacing.
 *
 * The panel lies in the plane orthogonal to its boresight. Weights are the
 * conjugate steering vector toward `steering()`, so the array factor toward
 * direction u is |sum_n exp(j*pi*(c*h.(u-s) + r*v.(u-s)))|^2 / N, which
 * peaks at N (10*log10(rows*cols) dB over one element) when u == s.
 */
class AntennaArray {
 public:
  AntennaArray() = default;
  AntennaArray(int rows, int cols, double element_gain_dbi = 8.0, ElementPattern pattern = ElementPattern::kTr38901);

  static AntennaArray upa(int rows, int cols) { return AntennaArray(rows, cols); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int elements() const { return rows_ * cols_; }
  double element_gain_dbi() const { return element_gain_dbi_; }
  ElementPattern pattern() const { return pattern_; }

  const Vec3& boresight() const { return normal_; }
  void set_boresight(const Vec3& direction);
  void set_boresight(double azimuth, double elevation) { set_boresight(direction_from_angles(azimuth, elevation)); }

  const Vec3& steering() const { return steering_; }
  void steer(const Vec3& direction) { steering_ = direction.normalized(); }

  // Array factor toward `target` in dB relative to a single element.
  double array_factor_db(const Vec3& target) const;
  // Element radiation pattern toward `target` (dBi), relative to the boresight.
  double element_gain_db(const Vec3& target) const;
  // Total gain: array factor plus element gain.
  double gain_db(const Vec3& target) const { return array_factor_db(target) + element_gain_db(target); }

  double peak_array_factor_db() const;

  // Panel axes: horizontal and vertical, both orthogonal to the boresight.
  const Vec3& horizontal_axis() const { return h_axis_; }
  const Vec3& vertical_axis() const { return v_axis_; }

 private:
  int rows_ = 1;
  int cols_ = 1;
  double element_gain_dbi_ = 0.0;
  ElementPattern pattern_ = ElementPattern::kIsotropic;
  Vec3 normal_{1.0, 0.0, 0.0};
  Vec3 h_axis_{0.0, 1.0, 0.0};
  Vec3 v_axis_{0.0, 0.0, 1.0};
  Vec3 steering_{1.0, 0.0, 0.0};
};

// Gain toward `target` of `array` with weights steered toward `steering`.
double beam_gain_db(AntennaArray array, const Vec3& steering, const Vec3& target);

// 3GPP parabolic element attenuation (<= 0 dB) for local azimuth/zenith in degrees.
double tr38901_element_attenuation_db(double azimuth_deg, double zenith_deg);

}  // namespace nrucoex::radio
