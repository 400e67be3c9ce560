#pragma once

// Chain impedance from fitted (omega_p, omega_g) plus one independently
// known circuit parameter.

#include <cmath>
#include <optional>
#include <variant>

#include "jjchain/anchor.hpp"
#include "jjchain/extraction/dispersion_fit.hpp"

namespace jjchain {

enum class ImpedanceRoute { inductance_anchor, capacitance_anchor };

inline const char* to_string(ImpedanceRoute r) {
  return r == ImpedanceRoute::inductance_anchor ? "inductance_anchor" : "capacitance_anchor";
}

struct ImpedanceEstimate {
  ImpedanceRoute route;
  double z_c;    // ohm
  double l_tot;  // H
  double l_j;    // H, anchored or inferred
  double c_g;    // F, anchored or inferred
  double c_j;    // F, from omega_p
};

inline ImpedanceEstimate impedance_from_scales(double omega_p, double omega_g, int chain_n,
                                               int big_n, std::optional<ImpedanceAnchor> anchor) {
  if (!anchor) throw Error(ErrorKind::MissingAnchor, "impedance needs an L_J or C_g anchor");
  detail::require(omega_p > 0.0 && omega_g > 0.0, "fitted frequencies must be positive");
  detail::require(chain_n >= 1 && big_n >= 2, "invalid chain size");
  const double n = chain_n;
  const double wg2 = omega_g * omega_g;

  ImpedanceEstimate out{};
  if (const auto* a = std::get_if<InductanceAnchor>(&*anchor)) {
    detail::require(a->l_j > 0.0, "L_J anchor must be positive");
    out.route = ImpedanceRoute::inductance_anchor;
    out.l_j = a->l_j;
    out.c_g = 1.0 / (n * a->l_j * wg2);
    out.z_c = n * a->l_j * omega_g;
  } else {
    const auto& c = std::get<CapacitanceAnchor>(*anchor);
    detail::require(c.c_g > 0.0, "C_g anchor must be positive");
    out.route = ImpedanceRoute::capacitance_anchor;
    out.c_g = c.c_g;
    out.l_j = 1.0 / (n * c.c_g * wg2);
    out.z_c = 1.0 / (c.c_g * omega_g);
  }
  out.l_tot = n * big_n * out.l_j;
  out.c_j = 1.0 / (out.l_j * omega_p * omega_p);
  return out;
}

inline ImpedanceEstimate impedance_from_fit(const DispersionFit& fit, int chain_n, int big_n,
                                            std::optional<ImpedanceAnchor> anchor) {
  detail::require(big_n == fit.big_n, "N differs from the one used in the dispersion fit");
  return impedance_from_scales(fit.omega_p, fit.omega_g, chain_n, big_n, anchor);
}

}  // namespace jjchain
