#pragma once

// Open-chain eigenmode spectrum: closed form, asymptotes, and an independent
// lumped-circuit generalized-eigenproblem oracle.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "jjchain/circuit.hpp"

namespace jjchain {

struct ModeSpectrum {
  std::vector<double> frequencies;   // rad/s, m = 1 ... N-1
  std::vector<double> bloch_phases;  // rad, m pi / N
  ChainParams params;
};

/// 2 (1 - cos(m pi / N)) computed as 4 sin^2(m pi / 2N).
inline double laplacian_eigenvalue(int m, int big_n) {
  const double half = std::sin(m * std::numbers::pi / (2.0 * big_n));
  return 4.0 * half * half;
}

/// Closed-form frequency of mode m from (omega_p, omega_g, N).
inline double mode_frequency(double omega_p, double omega_g, int m, int big_n) {
  const double lam = laplacian_eigenvalue(m, big_n);
  const double r = omega_p / omega_g;
  return omega_p * std::sqrt(lam / (r * r + lam));
}

inline double mode_frequency(const ChainParams& chain, int m) {
  detail::require(m >= 1 && m < chain.big_n(), "mode index must lie in [1, N-1]");
  const DerivedScales s = derive_scales(chain);
  return mode_frequency(s.omega_p, s.omega_g, m, chain.big_n());
}

/// Solves the closed-form spectrum for omega_g given one observed mode.
inline double omega_g_from_mode(double omega_m, int m, int big_n, double omega_p) {
  detail::require(omega_m > 0.0 && omega_m < omega_p, "mode frequency must lie in (0, omega_p)");
  detail::require(m >= 1 && m < big_n, "mode index must lie in [1, N-1]");
  const double lam = laplacian_eigenvalue(m, big_n);
  const double inv_g2 = lam * (1.0 / (omega_m * omega_m) - 1.0 / (omega_p * omega_p));
  return 1.0 / std::sqrt(inv_g2);
}

inline ModeSpectrum mode_frequencies(const ChainParams& chain) {
  const DerivedScales s = derive_scales(chain);
  const int big_n = chain.big_n();
  ModeSpectrum out{{}, {}, chain};
  out.frequencies.reserve(big_n - 1);
  out.bloch_phases.reserve(big_n - 1);
  for (int m = 1; m < big_n; ++m) {
    out.frequencies.push_back(mode_frequency(s.omega_p, s.omega_g, m, big_n));
    out.bloch_phases.push_back(m * std::numbers::pi / big_n);
  }
  return out;
}

/// Low-index linear dispersion m pi omega_g / N. Valid when
/// omega_p/omega_g >> pi/N; m = 0 returns 0.
inline double linear_dispersion_approx(const ChainParams& chain, int m) {
  detail::require(m >= 0 && m < chain.big_n(), "mode index must lie in [0, N-1]");
  return m * std::numbers::pi * derive_scales(chain).omega_g / chain.big_n();
}

/// Large-index limit 2 omega_g / sqrt(1 + 4 omega_g^2/omega_p^2); tends to
/// omega_p when omega_g >> omega_p. Coincides with the band edge.
inline double high_index_asymptote(const ChainParams& chain) {
  const DerivedScales s = derive_scales(chain);
  const double q = s.omega_g / s.omega_p;
  return 2.0 * s.omega_g / std::sqrt(1.0 + 4.0 * q * q);
}

/// Inductive reactance L_tot omega in the linear regime below the first
/// mode. The regime limit is the linear-dispersion estimate pi Z_c / L_tot,
/// at which the reactance reaches its bound pi Z_c.
inline double frequency_impedance(const ChainParams& chain, double omega) {
  detail::check_frequency(omega);
  const DerivedScales s = derive_scales(chain);
  const double omega_1 = std::numbers::pi * s.z_c / s.l_tot;
  if (omega > omega_1 * (1.0 + 1e-12)) {
    throw Error(ErrorKind::AboveLinearBand, "frequency above the first chain mode");
  }
  return s.l_tot * omega;
}

struct OracleSpectrum {
  std::vector<double> eigenvalues;  // omega^2 in rad^2/s^2, ascending, all N of them
  ModeSpectrum modes;               // positive roots after discarding the zero mode
  double zero_mode_ratio;           // |lambda_0| / lambda_1
};

/// Brute-force spectrum of the open ladder: N node fluxes, each shunted by
/// C_g, neighbours joined by n L_J in parallel with C_J / n. Solves
/// Gamma v = omega^2 C v with C positive definite, then drops the uniform
/// zero mode. Matrices are scaled by C_g and n L_J for conditioning.
inline OracleSpectrum oracle_eigenproblem(const ChainParams& chain) {
  const int big_n = chain.big_n();
  detail::require(big_n <= 2000, "oracle limited to N <= 2000");

  const double branch_c = chain.c_j() / chain.n() / chain.c_g();  // in units of C_g
  Eigen::MatrixXd cap = Eigen::MatrixXd::Zero(big_n, big_n);
  Eigen::MatrixXd inv_ind = Eigen::MatrixXd::Zero(big_n, big_n);  // in units of 1/(n L_J)
  for (int i = 0; i < big_n; ++i) {
    const int degree = (i == 0 || i == big_n - 1) ? 1 : 2;
    cap(i, i) = 1.0 + branch_c * degree;
    inv_ind(i, i) = degree;
    if (i + 1 < big_n) {
      cap(i, i + 1) = cap(i + 1, i) = -branch_c;
      inv_ind(i, i + 1) = inv_ind(i + 1, i) = -1.0;
    }
  }

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      inv_ind, cap, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure, "generalized eigensolve did not converge");
  }

  const double scale = derive_scales(chain).omega_g;
  std::vector<double> eig(big_n);
  for (int i = 0; i < big_n; ++i) eig[i] = solver.eigenvalues()(i) * scale * scale;
  std::sort(eig.begin(), eig.end());

  const double ratio = std::abs(eig[0]) / eig[1];
  if (!(ratio < 1e-10)) {
    throw Error(ErrorKind::NumericalFailure, "oracle could not isolate the uniform zero mode");
  }

  ModeSpectrum modes{{}, {}, chain};
  for (int m = 1; m < big_n; ++m) {
    if (!(eig[m] > 0.0)) {
      throw Error(ErrorKind::NumericalFailure, "oracle produced a non-positive mode eigenvalue");
    }
    modes.frequencies.push_back(std::sqrt(eig[m]));
    modes.bloch_phases.push_back(m * std::numbers::pi / big_n);
  }
  return {std::move(eig), std::move(modes), ratio};
}

inline ModeSpectrum oracle_modes(const ChainParams& chain) {
  return oracle_eigenproblem(chain).modes;
}

}  // namespace jjchain
