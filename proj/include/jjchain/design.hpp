#pragma once

// Inverse design: integer (n, N) chains meeting a target characteristic
// impedance and total inductance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "jjchain/anchor.hpp"
#include "jjchain/circuit.hpp"
#include "jjchain/constants.hpp"
#include "jjchain/spectrum.hpp"

namespace jjchain {

struct IntRange {
  int lo;
  int hi;
};

struct RealRange {
  double lo;
  double hi;
};

struct DesignConstraints {
  IntRange n{1, 500};
  IntRange big_n{2, 100000};
  std::optional<RealRange> l_j;
  std::optional<RealRange> c_g;
};

struct DesignTarget {
  static constexpr double default_plasma_frequency = constants::two_pi * 15e9;

  double z_c_target;    // ohm
  double l_tot_target;  // H
  DesignConstraints constraints{};
  /// Junction capacitance. When absent it follows from `omega_p`.
  std::optional<double> c_j;
  double omega_p = default_plasma_frequency;
  double tolerance = 0.10;  // relative, on both targets
};

enum class DesignStrategy { thicker_oxide, deeper_stack, mixed };

inline const char* to_string(DesignStrategy s) {
  switch (s) {
    case DesignStrategy::thicker_oxide: return "thicker-oxide";
    case DesignStrategy::deeper_stack: return "deeper-stack";
    case DesignStrategy::mixed: return "mixed";
  }
  return "mixed";
}

/// One candidate chain. Figures of merit are always recomputed from the
/// stored circuit parameters.
struct DesignProposal {
  int n;
  int big_n;
  double l_j;
  double c_j;
  double c_g;
  DesignStrategy strategy;

  /// Chains of a single stack host no internal mode and have no ChainParams.
  std::optional<ChainParams> chain() const {
    if (big_n < 2) return std::nullopt;
    return ChainParams(n, big_n, JunctionParams(l_j, c_j), c_g);
  }
  double achieved_z_c() const { return characteristic_impedance(n, l_j, c_g); }
  double achieved_l_tot() const { return total_inductance(n, big_n, l_j); }
  /// Exact first mode; absent for N = 1.
  std::optional<double> omega_1() const {
    if (const auto c = chain()) return mode_frequency(*c, 1);
    return std::nullopt;
  }
  double max_linear_impedance() const { return std::numbers::pi * achieved_z_c(); }
  /// Per-junction E_J / E_C with E_J = (Phi_0 / 2 pi)^2 / L_J, E_C = e^2 / (2 C_J).
  double ej_over_ec() const {
    const double phi = constants::flux_quantum / constants::two_pi;
    const double e = constants::elementary_charge;
    return (phi * phi / l_j) / (e * e / (2.0 * c_j));
  }
};

/// pi Z_c, the reactance L_tot omega_1 reached at the linear-dispersion
/// estimate of the first mode.
inline double max_linear_impedance(const ChainParams& chain) {
  return std::numbers::pi * derive_scales(chain).z_c;
}

/// Enumerates integer (n, N) inside the bounds. The anchor fixes L_J or C_g;
/// the other follows from Z_c^2 = n L_J / C_g (clamped to its bounds) and
/// L_tot = n N L_J then selects the N window within tolerance. Proposals are
/// ranked by relative Z_c deviation, then relative L_tot deviation.
///
/// Strategy tags: with a fixed L_J the impedance is raised by stacking
/// (deeper-stack); with a fixed C_g and n = 1 only the oxide moves
/// (thicker-oxide); with a fixed C_g and n > 1 both move (mixed).
inline std::vector<DesignProposal> solve_design(const DesignTarget& target,
                                                const ImpedanceAnchor& anchor) {
  const auto& b = target.constraints;
  detail::require(target.z_c_target > 0.0 && target.l_tot_target > 0.0,
                  "design targets must be positive");
  detail::require(b.n.lo >= 1 && b.n.lo <= b.n.hi, "invalid n bounds");
  detail::require(b.big_n.lo >= 1 && b.big_n.lo <= b.big_n.hi, "invalid N bounds");
  if (b.l_j) detail::require(b.l_j->lo > 0.0 && b.l_j->lo <= b.l_j->hi, "invalid L_J bounds");
  if (b.c_g) detail::require(b.c_g->lo > 0.0 && b.c_g->lo <= b.c_g->hi, "invalid C_g bounds");
  detail::require(target.tolerance > 0.0, "tolerance must be positive");
  detail::require(target.omega_p > 0.0, "plasma frequency must be positive");
  if (target.c_j) detail::require(*target.c_j > 0.0, "junction capacitance must be positive");

  const double z2 = target.z_c_target * target.z_c_target;
  auto clamp_to = [](double v, const std::optional<RealRange>& r) {
    return r ? std::clamp(v, r->lo, r->hi) : v;
  };
  auto inside = [](double v, const std::optional<RealRange>& r) {
    return !r || (v >= r->lo && v <= r->hi);
  };

  std::vector<DesignProposal> out;
  for (int n = b.n.lo; n <= b.n.hi; ++n) {
    double l_j = 0.0;
    double c_g = 0.0;
    DesignStrategy strategy = DesignStrategy::deeper_stack;
    if (const auto* a = std::get_if<InductanceAnchor>(&anchor)) {
      detail::require(a->l_j > 0.0, "L_J anchor must be positive");
      if (!inside(a->l_j, b.l_j)) continue;
      l_j = a->l_j;
      c_g = clamp_to(n * l_j / z2, b.c_g);
    } else {
      const double anchor_cg = std::get<CapacitanceAnchor>(anchor).c_g;
      detail::require(anchor_cg > 0.0, "C_g anchor must be positive");
      if (!inside(anchor_cg, b.c_g)) continue;
      c_g = anchor_cg;
      l_j = clamp_to(z2 * c_g / n, b.l_j);
      strategy = n == 1 ? DesignStrategy::thicker_oxide : DesignStrategy::mixed;
    }
    const double c_j = target.c_j.value_or(1.0 / (l_j * target.omega_p * target.omega_p));

    const double ideal_n = target.l_tot_target / (n * l_j);
    const double lo = std::max<double>(b.big_n.lo, std::ceil((1.0 - target.tolerance) * ideal_n));
    const double hi = std::min<double>(b.big_n.hi, std::floor((1.0 + target.tolerance) * ideal_n));
    for (double big = lo; big <= hi; big += 1.0) {
      DesignProposal p{n, static_cast<int>(big), l_j, c_j, c_g, strategy};
      const double dz = std::abs(p.achieved_z_c() - target.z_c_target) / target.z_c_target;
      const double dl = std::abs(p.achieved_l_tot() - target.l_tot_target) / target.l_tot_target;
      if (dz <= target.tolerance && dl <= target.tolerance) out.push_back(p);
    }
  }
  if (out.empty()) {
    throw Error(ErrorKind::Infeasible, "no (n, N) within bounds meets both targets within tolerance");
  }

  // Deviations are compared on fixed grids (1e-9 for Z_c, 1e-12 for L_tot)
  // so rounding noise never decides the order.
  auto key = [&](const DesignProposal& p) {
    const double dz = std::abs(p.achieved_z_c() - target.z_c_target) / target.z_c_target;
    const double dl = std::abs(p.achieved_l_tot() - target.l_tot_target) / target.l_tot_target;
    return std::tuple(std::llround(dz * 1e9), std::llround(dl * 1e12), p.n, p.big_n);
  };
  std::stable_sort(out.begin(), out.end(),
                   [&](const DesignProposal& a, const DesignProposal& b2) { return key(a) < key(b2); });
  return out;
}

}  // namespace jjchain
