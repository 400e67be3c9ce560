#pragma once

// Pyramidal junction stacks from progressive mask clogging.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "jjchain/error.hpp"

namespace jjchain {

/// Area-inductance calibration of the oxidation recipe, L_J * area (H m^2).
/// 4 nH for a 1 um^2 junction.
inline constexpr double default_area_inductance_constant = 4e-9 * 1e-12;

inline constexpr double default_clog_angle = 12.8 * std::numbers::pi / 180.0;
/// Angle read off the stack cross-section drawing; alternative preset.
inline constexpr double alternative_clog_angle = 12.5 * std::numbers::pi / 180.0;

/// Square-base stack whose side shrinks by 2 tan(angle) per unit height.
/// Layer k sits at height k * layer_pitch; k = 0 is the base junction.
class PyramidStack {
 public:
  PyramidStack(double base_side, double layer_pitch, int layer_count, double clog_angle)
      : base_side_(base_side), layer_pitch_(layer_pitch), layer_count_(layer_count),
        clog_angle_(clog_angle) {
    detail::require(std::isfinite(base_side) && base_side > 0.0, "base side must be positive");
    detail::require(std::isfinite(layer_pitch) && layer_pitch > 0.0, "layer pitch must be positive");
    detail::require(layer_count >= 1, "layer count must be >= 1");
    detail::require(clog_angle >= 0.0 && clog_angle < 0.5 * std::numbers::pi,
                    "clog angle must lie in [0, pi/2)");
    if (!(side_at(layer_count - 1) > 0.0)) {
      throw Error(ErrorKind::InvertedPyramid, "top layer of the stack has no area left");
    }
  }

  double base_side() const noexcept { return base_side_; }
  double layer_pitch() const noexcept { return layer_pitch_; }
  int layer_count() const noexcept { return layer_count_; }
  double clog_angle() const noexcept { return clog_angle_; }

  double side_at(int k) const { return base_side_ - 2.0 * k * layer_pitch_ * std::tan(clog_angle_); }

 private:
  double base_side_;
  double layer_pitch_;
  int layer_count_;
  double clog_angle_;
};

/// Area lost between the base and a cross-section at `height`:
/// 4 l h tan(angle) - 4 h^2 tan^2(angle).
inline double area_reduction(double base_side, double height, double clog_angle) {
  const double t = std::tan(clog_angle);
  return 4.0 * base_side * height * t - 4.0 * height * height * t * t;
}

inline double layer_area(const PyramidStack& stack, int k) {
  detail::require(k >= 0 && k < stack.layer_count(), "layer index out of range");
  const double side = stack.side_at(k);
  if (!(side > 0.0)) throw Error(ErrorKind::InvertedPyramid, "layer side length is not positive");
  return side * side;
}

inline double area_to_inductance(double area,
                                 double area_inductance_constant = default_area_inductance_constant) {
  detail::require(std::isfinite(area) && area > 0.0, "junction area must be positive");
  detail::require(area_inductance_constant > 0.0, "area-inductance constant must be positive");
  return area_inductance_constant / area;
}

struct LayerAreas {
  std::vector<double> areas;        // m^2, base first
  std::vector<double> inductances;  // H
};

struct InhomogeneityReport {
  LayerAreas layers;
  double total_l;  // series sum of the layer inductances (H)
  double spread;   // (max L - min L) / mean L
};

inline InhomogeneityReport inhomogeneity_report(
    const PyramidStack& stack, double area_inductance_constant = default_area_inductance_constant) {
  InhomogeneityReport out{};
  for (int k = 0; k < stack.layer_count(); ++k) {
    const double a = layer_area(stack, k);
    out.layers.areas.push_back(a);
    out.layers.inductances.push_back(area_to_inductance(a, area_inductance_constant));
  }
  const auto& l = out.layers.inductances;
  out.total_l = std::accumulate(l.begin(), l.end(), 0.0);
  const auto [lo, hi] = std::minmax_element(l.begin(), l.end());
  out.spread = (*hi - *lo) / (out.total_l / static_cast<double>(l.size()));
  return out;
}

}  // namespace jjchain
