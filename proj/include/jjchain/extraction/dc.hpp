#pragma once

// Room-temperature resistance to Josephson inductance.

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "jjchain/constants.hpp"
#include "jjchain/error.hpp"

namespace jjchain {

/// Superconducting gap and the empirical thin-film correction applied to
/// the Ambegaokar-Baratoff relation.
///
/// The correction multiplies the inferred inductance:
///   L_J = correction_factor * hbar R / (pi delta),
/// i.e. the relation is evaluated with an effective gap delta / factor.
struct SuperconductorGap {
  static constexpr double default_delta = 180e-6 * constants::electron_volt;  // bulk Al
  static constexpr double default_correction = 1.45;

  double delta = default_delta;                   // J
  double correction_factor = default_correction;  // dimensionless

  void validate() const {
    detail::require(std::isfinite(delta) && delta > 0.0, "superconducting gap must be positive");
    detail::require(std::isfinite(correction_factor) && correction_factor > 0.0,
                    "gap correction factor must be positive");
  }

  double effective_delta() const { return delta / correction_factor; }
};

/// Critical current from R = pi Delta / (2 e I_c), then L_J = hbar / (2 e I_c).
inline double resistance_to_inductance(double r, const SuperconductorGap& gap = {}) {
  gap.validate();
  detail::require(std::isfinite(r) && r > 0.0, "resistance must be positive");
  return constants::hbar * r / (std::numbers::pi * gap.effective_delta());
}

inline double inductance_to_resistance(double l_j, const SuperconductorGap& gap = {}) {
  gap.validate();
  detail::require(std::isfinite(l_j) && l_j > 0.0, "inductance must be positive");
  return l_j * std::numbers::pi * gap.effective_delta() / constants::hbar;
}

struct DcPoint {
  int stack_count;
  double resistance;  // ohm
};

struct DcFit {
  double slope;                    // ohm per stack
  double slope_stderr;             // ohm per stack, NaN for a single point
  double per_junction_resistance;  // ohm
  double l_j;                      // H
  double residual_rms;             // ohm
};

/// Least-squares line through the origin, R = slope * stack_count.
inline DcFit dc_linear_fit(const std::vector<DcPoint>& points, int junctions_per_stack,
                           const SuperconductorGap& gap = {}) {
  detail::require(!points.empty(), "DC fit needs at least one point");
  detail::require(junctions_per_stack >= 1, "junctions per stack must be >= 1");
  double sxx = 0.0;
  double sxy = 0.0;
  bool distinct = false;
  for (const DcPoint& p : points) {
    detail::require(p.stack_count >= 1, "stack counts must be >= 1");
    detail::require(std::isfinite(p.resistance) && p.resistance > 0.0,
                    "resistances must be positive");
    if (p.stack_count != points.front().stack_count) distinct = true;
    sxx += static_cast<double>(p.stack_count) * p.stack_count;
    sxy += p.stack_count * p.resistance;
  }
  if (points.size() > 1 && !distinct) {
    throw Error(ErrorKind::DegenerateData, "all stack counts are equal");
  }
  const double slope = sxy / sxx;
  double ssr = 0.0;
  for (const DcPoint& p : points) {
    const double r = p.resistance - slope * p.stack_count;
    ssr += r * r;
  }
  const auto n = static_cast<double>(points.size());
  const double stderr_ = points.size() > 1 ? std::sqrt(ssr / (n - 1.0) / sxx)
                                           : std::numeric_limits<double>::quiet_NaN();
  const double per_junction = slope / junctions_per_stack;
  return DcFit{slope, stderr_, per_junction, resistance_to_inductance(per_junction, gap),
               std::sqrt(ssr / n)};
}

}  // namespace jjchain
