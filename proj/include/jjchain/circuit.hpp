#pragma once

// Lumped-element model of a chain of Josephson-junction stacks and the
// closed-form per-frequency quantities derived from it: stack impedance,
// ground admittance, unit-cell and chain ABCD matrices, dispersion relation.
//
// Every quantity is expressed in angular frequency (rad/s). Time dependence
// follows the engineering convention e^{+j omega t}, so an inductor has
// impedance +j omega L.

#include <cmath>
#include <complex>
#include <string>

#include "jjchain/error.hpp"

namespace jjchain {

using Complex = std::complex<double>;

/// Linearized junction: inductance L_J in parallel with capacitance C_J.
class JunctionParams {
 public:
  JunctionParams(double l_j, double c_j) : l_j_(l_j), c_j_(c_j) {
    detail::require(std::isfinite(l_j) && l_j > 0.0, "junction inductance must be positive");
    detail::require(std::isfinite(c_j) && c_j > 0.0, "junction capacitance must be positive");
    detail::require(std::isfinite(plasma_frequency()), "plasma frequency is not finite");
  }

  double l_j() const noexcept { return l_j_; }
  double c_j() const noexcept { return c_j_; }
  double plasma_frequency() const noexcept { return 1.0 / std::sqrt(l_j_ * c_j_); }

  bool operator==(const JunctionParams&) const = default;

 private:
  double l_j_;
  double c_j_;
};

/// Chain of `big_n` identical stacks, each holding `n` junctions in series
/// and one capacitance `c_g` to ground.
class ChainParams {
 public:
  ChainParams(int n, int big_n, JunctionParams junction, double c_g)
      : n_(n), big_n_(big_n), junction_(junction), c_g_(c_g) {
    detail::require(n >= 1, "junctions per stack must be >= 1");
    detail::require(big_n >= 2, "chain needs at least 2 stacks to host a mode");
    detail::require(std::isfinite(c_g) && c_g > 0.0, "ground capacitance must be positive");
  }

  int n() const noexcept { return n_; }
  int big_n() const noexcept { return big_n_; }
  const JunctionParams& junction() const noexcept { return junction_; }
  double l_j() const noexcept { return junction_.l_j(); }
  double c_j() const noexcept { return junction_.c_j(); }
  double c_g() const noexcept { return c_g_; }

  bool operator==(const ChainParams&) const = default;

 private:
  int n_;
  int big_n_;
  JunctionParams junction_;
  double c_g_;
};

struct DerivedScales {
  double omega_p;  // rad/s
  double omega_g;  // rad/s
  double z_c;      // ohm
  double l_tot;    // H
  double c_stray;  // F
};

/// Z_c = sqrt(n L_J / C_g).
inline double characteristic_impedance(int n, double l_j, double c_g) {
  return std::sqrt(n * l_j / c_g);
}

/// L_tot = n N L_J.
inline double total_inductance(int n, int big_n, double l_j) {
  return static_cast<double>(n) * big_n * l_j;
}

inline DerivedScales derive_scales(const ChainParams& chain) {
  const double n = chain.n();
  const double l_j = chain.l_j();
  return DerivedScales{
      .omega_p = chain.junction().plasma_frequency(),
      .omega_g = 1.0 / std::sqrt(n * chain.c_g() * l_j),
      .z_c = characteristic_impedance(chain.n(), l_j, chain.c_g()),
      .l_tot = total_inductance(chain.n(), chain.big_n(), l_j),
      .c_stray = chain.big_n() * chain.c_g(),
  };
}

/// Transfer (ABCD) matrix of a two-port: [V1; I1] = M [V2; I2].
struct TwoPortABCD {
  Complex a{1.0};
  Complex b{0.0};
  Complex c{0.0};
  Complex d{1.0};

  static TwoPortABCD identity() { return {}; }

  Complex det() const { return a * d - b * c; }

  friend TwoPortABCD operator*(const TwoPortABCD& l, const TwoPortABCD& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
            l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
  }
};

namespace detail {

inline constexpr double plasma_guard = 1e-12;

inline void check_frequency(double omega) {
  require(std::isfinite(omega) && omega >= 0.0, "angular frequency must be finite and >= 0");
}

inline void check_plasma_pole(const ChainParams& chain, double omega) {
  const double ratio = omega / chain.junction().plasma_frequency();
  if (std::abs(ratio - 1.0) < plasma_guard) {
    throw Error(ErrorKind::PlasmaSingularity,
                "frequency coincides with the junction plasma frequency");
  }
}

// sin(k x) / sin(x) and its hyperbolic analogue, exact at x = 0.
inline double sin_ratio(int k, double x) {
  return x == 0.0 ? static_cast<double>(k) : std::sin(k * x) / std::sin(x);
}
inline double sinh_ratio(int k, double x) {
  return x == 0.0 ? static_cast<double>(k) : std::sinh(k * x) / std::sinh(x);
}

}  // namespace detail

/// Z_s = n j L_J omega / (1 - omega^2/omega_p^2).
inline Complex stack_impedance(const ChainParams& chain, double omega) {
  detail::check_frequency(omega);
  detail::check_plasma_pole(chain, omega);
  const double wp = chain.junction().plasma_frequency();
  const double denom = 1.0 - (omega / wp) * (omega / wp);
  return {0.0, chain.n() * chain.l_j() * omega / denom};
}

/// Y_g = j C_g omega. Defined for any real omega.
inline Complex ground_admittance(const ChainParams& chain, double omega) {
  return {0.0, chain.c_g() * omega};
}

/// 1 - cos(theta) = (omega^2/omega_g^2) / (2 (1 - omega^2/omega_p^2)).
/// Evaluated directly rather than as 1 - A so that small Bloch phases keep
/// full relative precision.
inline double one_minus_cos_theta(const ChainParams& chain, double omega) {
  detail::check_frequency(omega);
  detail::check_plasma_pole(chain, omega);
  const DerivedScales s = derive_scales(chain);
  const double xg = omega / s.omega_g;
  const double xp = omega / s.omega_p;
  return xg * xg / (2.0 * (1.0 - xp * xp));
}

/// Unit-cell dispersion relation cos(theta(omega)); equals the A entry of
/// the unit-cell ABCD matrix. Strictly decreasing on [0, omega_p).
inline double dispersion_cos_theta(const ChainParams& chain, double omega) {
  return 1.0 - one_minus_cos_theta(chain, omega);
}

/// Inverse of the dispersion relation below the plasma frequency: the unique
/// omega in [0, omega_p) whose unit cell has the given 1 - cos(theta) >= 0.
inline double omega_at_one_minus_cos(const ChainParams& chain, double one_minus_cos) {
  detail::require(std::isfinite(one_minus_cos) && one_minus_cos >= 0.0,
                  "1 - cos(theta) must be >= 0 below the plasma frequency");
  const DerivedScales s = derive_scales(chain);
  const double lam = 2.0 * one_minus_cos;
  return std::sqrt(lam / (1.0 / (s.omega_g * s.omega_g) + lam / (s.omega_p * s.omega_p)));
}

/// Upper edge of the propagating band, where cos(theta) = -1.
inline double band_edge(const ChainParams& chain) {
  return omega_at_one_minus_cos(chain, 2.0);
}

/// Symmetric T cell: half stack, shunt to ground, half stack.
inline TwoPortABCD unit_cell_abcd(const ChainParams& chain, double omega) {
  const Complex zs = stack_impedance(chain, omega);
  const Complex yg = ground_admittance(chain, omega);
  const Complex zy = zs * yg;
  const Complex a = 1.0 + zy / 2.0;
  return {a, zs * (1.0 + zy / 4.0), yg, a};
}

/// Bloch impedance sqrt(B/C) of the unit cell, real and positive inside the
/// propagating band. Outside the band the impedance is imaginary and
/// EvanescentBand is raised.
inline Complex unit_cell_impedance(const ChainParams& chain, double omega) {
  detail::check_frequency(omega);
  detail::check_plasma_pole(chain, omega);
  const DerivedScales s = derive_scales(chain);
  const double xp = omega / s.omega_p;
  const double below_plasma = 1.0 - xp * xp;
  if (below_plasma <= 0.0) {
    throw Error(ErrorKind::EvanescentBand, "frequency above the plasma frequency");
  }
  const double xg = omega / s.omega_g;
  const double radicand = 1.0 - xg * xg / (4.0 * below_plasma);
  if (radicand < 0.0) {
    throw Error(ErrorKind::EvanescentBand, "frequency above the band edge (cos theta < -1)");
  }
  return {s.z_c / std::sqrt(below_plasma) * std::sqrt(radicand), 0.0};
}

/// ABCD matrix of `cells` cascaded unit cells in closed form.
///
/// Uses M^k = U_{k-1}(A) M - U_{k-2}(A) I for a unimodular symmetric M, so
/// A_k = D_k = cos(k theta), B_k = B sin(k theta)/sin(theta), C_k likewise.
/// Branches:
///   0 <= 1-A <= 2 : real theta in [0, pi] (propagating band)
///   1-A < 0       : A = cosh(t), theta = j t (above the plasma frequency)
///   1-A > 2       : A = -cosh(t), theta = pi + j t (above the band edge)
/// Near theta = pi the phase is measured from pi to keep precision.
inline TwoPortABCD chain_abcd(const ChainParams& chain, double omega, int cells) {
  detail::require(cells >= 1, "cell count must be >= 1");
  const TwoPortABCD cell = unit_cell_abcd(chain, omega);
  const double x = one_minus_cos_theta(chain, omega);
  const double sign = (cells % 2 == 0) ? 1.0 : -1.0;  // (-1)^k

  double cos_k = 0.0;
  double ratio = 0.0;
  if (x >= 0.0 && x <= 1.0) {
    const double theta = 2.0 * std::asin(std::sqrt(x / 2.0));
    cos_k = std::cos(cells * theta);
    ratio = detail::sin_ratio(cells, theta);
  } else if (x > 1.0 && x <= 2.0) {
    const double eps = 2.0 * std::asin(std::sqrt((2.0 - x) / 2.0));  // pi - theta
    cos_k = sign * std::cos(cells * eps);
    ratio = -sign * detail::sin_ratio(cells, eps);
  } else if (x < 0.0) {
    const double t = 2.0 * std::asinh(std::sqrt(-x / 2.0));
    cos_k = std::cosh(cells * t);
    ratio = detail::sinh_ratio(cells, t);
  } else {
    const double t = 2.0 * std::asinh(std::sqrt((x - 2.0) / 2.0));
    cos_k = sign * std::cosh(cells * t);
    ratio = -sign * detail::sinh_ratio(cells, t);
  }
  return {Complex(cos_k), cell.b * ratio, cell.c * ratio, Complex(cos_k)};
}

/// Whole chain: N cascaded unit cells.
inline TwoPortABCD chain_abcd(const ChainParams& chain, double omega) {
  return chain_abcd(chain, omega, chain.big_n());
}

}  // namespace jjchain
