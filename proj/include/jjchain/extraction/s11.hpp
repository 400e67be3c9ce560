#pragma once

// Complex reflection fit of a single resonance with an impedance-mismatch
// rotation, and quality-factor reporting.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jjchain/circuit.hpp"
#include "jjchain/constants.hpp"
#include "jjchain/least_squares.hpp"

namespace jjchain {

struct ResonanceParams {
  double omega_0;  // rad/s
  double kappa_c;  // rad/s
  double kappa_i;  // rad/s
  double phi_0;    // rad
};

/// S11 = 1 - 2 kappa_c (1 + j tan phi_0) / (kappa_c + kappa_i + 2j (omega - omega_0)).
inline Complex s11_model(const ResonanceParams& p, double omega) {
  const Complex mismatch(1.0, std::tan(p.phi_0));
  const Complex denom(p.kappa_c + p.kappa_i, 2.0 * (omega - p.omega_0));
  return 1.0 - 2.0 * p.kappa_c * mismatch / denom;
}

struct ModelCircle {
  Complex center;
  double radius;
};

/// Locus of the model in the complex plane: a circle through S11 = 1.
inline ModelCircle model_circle(const ResonanceParams& p) {
  const Complex mismatch(1.0, std::tan(p.phi_0));
  const double ratio = p.kappa_c / (p.kappa_c + p.kappa_i);
  return {1.0 - ratio * mismatch, ratio * std::abs(mismatch)};
}

struct S11Point {
  double frequency;  // Hz
  Complex s11;
};

/// Optional starting values replacing the automatic initialization.
struct ResonanceInit {
  std::optional<double> omega_0;
  std::optional<double> kappa_c;
  std::optional<double> kappa_i;
  std::optional<double> phi_0;
};

struct ResonanceFit {
  double omega_0;
  double kappa_c;
  double kappa_i;
  double phi_0;
  double q_tot;
  double q_c;
  std::optional<double> q_i;  // empty when kappa_i = 0
  double q_i_lower_bound;
  bool fano_caveat;
  double residual_rms;      // rms |S11_data - S11_model|
  double circle_deviation;  // rms radial distance of the data from the model circle
  double noise_floor;       // per-component noise estimate
  int iterations;
  std::vector<std::string> warnings;

  ResonanceParams params() const { return {omega_0, kappa_c, kappa_i, phi_0}; }
};

struct QFactors {
  double q_tot;
  double q_c;
  double q_i_lower_bound;
  bool individually_reliable;  // false when the Fano caveat applies
};

inline QFactors q_factors(const ResonanceFit& fit) {
  return {fit.omega_0 / (fit.kappa_c + fit.kappa_i), fit.omega_0 / fit.kappa_c,
          fit.q_i_lower_bound, !fit.fano_caveat};
}

namespace detail {

// Robust per-component noise level from second differences. For white
// complex noise of per-component deviation s, |d2| is Rayleigh with scale
// sqrt(6) s, whose median is sqrt(6 * 2 ln 2) s.
inline double second_difference_noise(const std::vector<Complex>& z) {
  if (z.size() < 3) return 0.0;
  std::vector<double> mag;
  mag.reserve(z.size() - 2);
  for (std::size_t k = 1; k + 1 < z.size(); ++k) mag.push_back(std::abs(z[k + 1] - 2.0 * z[k] + z[k - 1]));
  const auto mid = mag.begin() + static_cast<std::ptrdiff_t>(mag.size() / 2);
  std::nth_element(mag.begin(), mid, mag.end());
  return *mid / std::sqrt(12.0 * std::log(2.0));
}

}  // namespace detail

/// Least-squares fit of the complex reflection model over
/// (omega_0, kappa_c, kappa_i, phi_0).
///
/// Initialization: omega_0 at the largest excursion from the off-resonance
/// level, kappa from the full width at half maximum of that squared
/// excursion, kappa_c = kappa_i = kappa / 2, phi_0 = 0.
/// The Fano caveat is raised when |phi_0| > 0.1 rad or when the data depart
/// from the fitted circle by more than 5x the noise floor.
inline ResonanceFit fit_s11(const std::vector<S11Point>& trace, const ResonanceInit& init = {},
                            const LmOptions& solver = {}) {
  detail::require(trace.size() >= 5, "S11 fit needs at least 5 points");
  for (std::size_t k = 0; k < trace.size(); ++k) {
    detail::require(std::isfinite(trace[k].frequency) && std::isfinite(trace[k].s11.real()) &&
                        std::isfinite(trace[k].s11.imag()),
                    "S11 trace contains non-finite values");
    if (k > 0) detail::require(trace[k].frequency > trace[k - 1].frequency,
                               "S11 frequencies must strictly increase");
  }

  const std::size_t count = trace.size();
  std::vector<double> omega(count);
  std::vector<Complex> data(count);
  for (std::size_t k = 0; k < count; ++k) {
    omega[k] = constants::two_pi * trace[k].frequency;
    data[k] = trace[k].s11;
  }

  // Off-resonance level from the trace ends.
  const std::size_t edge = std::max<std::size_t>(2, count / 20);
  Complex reference(0.0);
  for (std::size_t k = 0; k < edge; ++k) reference += data[k] + data[count - 1 - k];
  reference /= static_cast<double>(2 * edge);

  std::vector<double> excursion(count);
  for (std::size_t k = 0; k < count; ++k) excursion[k] = std::norm(data[k] - reference);
  const std::size_t peak =
      static_cast<std::size_t>(std::max_element(excursion.begin(), excursion.end()) - excursion.begin());

  // Noise envelope: the largest excursion pure noise reaches over the trace.
  const double envelope =
      detail::second_difference_noise(data) * std::sqrt(2.0 * std::log(static_cast<double>(count)));
  if (!(std::sqrt(excursion[peak]) > 3.0 * envelope)) {
    throw Error(ErrorKind::OffResonanceTrace, "no resonance exceeds 3x the trace noise");
  }

  const double half = 0.5 * excursion[peak];
  auto crossing = [&](std::size_t inner, std::size_t outer) {
    const double t = (excursion[inner] - half) / (excursion[inner] - excursion[outer]);
    return omega[inner] + t * (omega[outer] - omega[inner]);
  };
  double left = omega.front();
  for (std::size_t k = peak; k > 0; --k) {
    if (excursion[k - 1] < half) {
      left = crossing(k, k - 1);
      break;
    }
  }
  double right = omega.back();
  for (std::size_t k = peak; k + 1 < count; ++k) {
    if (excursion[k + 1] < half) {
      right = crossing(k, k + 1);
      break;
    }
  }
  const double kappa0 = std::max(right - left, 1e-9 * omega[peak]);

  const double omega_ref = init.omega_0.value_or(omega[peak]);
  const double scale = (init.kappa_c && init.kappa_i) ? (*init.kappa_c + *init.kappa_i) : kappa0;
  detail::require(scale > 0.0, "initial linewidth must be positive");

  std::vector<double> u(count);
  for (std::size_t k = 0; k < count; ++k) u[k] = (omega[k] - omega_ref) / scale;

  auto unpack = [](const Eigen::VectorXd& x) { return ResonanceParams{x[0], x[1], x[2], x[3]}; };
  auto residual = [&](const Eigen::VectorXd& x) {
    const ResonanceParams p = unpack(x);
    Eigen::VectorXd r(2 * count);
    for (std::size_t k = 0; k < count; ++k) {
      const Complex d = s11_model(p, u[k]) - data[k];
      r[2 * k] = d.real();
      r[2 * k + 1] = d.imag();
    }
    return r;
  };
  auto jacobian = [&](const Eigen::VectorXd& x) {
    const ResonanceParams p = unpack(x);
    const double tan_phi = std::tan(p.phi_0);
    const Complex mismatch(1.0, tan_phi);
    constexpr Complex j(0.0, 1.0);
    Eigen::MatrixXd jac(2 * count, 4);
    for (std::size_t k = 0; k < count; ++k) {
      const Complex denom(p.kappa_c + p.kappa_i, 2.0 * (u[k] - p.omega_0));
      const Complex inv2 = 1.0 / (denom * denom);
      const Complex cols[4] = {
          -4.0 * j * p.kappa_c * mismatch * inv2,              // d/d omega_0
          -2.0 * mismatch * (denom - p.kappa_c) * inv2,        // d/d kappa_c
          2.0 * p.kappa_c * mismatch * inv2,                   // d/d kappa_i
          -2.0 * p.kappa_c * j * (1.0 + tan_phi * tan_phi) / denom,  // d/d phi_0
      };
      for (int c = 0; c < 4; ++c) {
        jac(2 * k, c) = cols[c].real();
        jac(2 * k + 1, c) = cols[c].imag();
      }
    }
    return jac;
  };

  Eigen::Vector4d x0(0.0, 0.5 * kappa0 / scale, 0.5 * kappa0 / scale, 0.0);
  if (init.kappa_c) x0[1] = *init.kappa_c / scale;
  if (init.kappa_i) x0[2] = *init.kappa_i / scale;
  if (init.phi_0) x0[3] = *init.phi_0;

  LmOptions lm = solver;
  const double half_pi = 0.5 * std::numbers::pi;
  const double inf = std::numeric_limits<double>::infinity();
  lm.lower = Eigen::Vector4d(-inf, 0.0, 0.0, -half_pi + 1e-6);
  lm.upper = Eigen::Vector4d(inf, inf, inf, half_pi - 1e-6);

  const LmResult res = levenberg_marquardt(residual, jacobian, Eigen::VectorXd(x0), lm);
  if (!res.converged) throw Error(ErrorKind::NonConvergence, "S11 fit did not converge");

  ResonanceFit fit{};
  fit.omega_0 = omega_ref + res.x[0] * scale;
  fit.kappa_c = res.x[1] * scale;
  fit.kappa_i = res.x[2] * scale;
  fit.phi_0 = res.x[3];
  fit.iterations = res.iterations;
  detail::require(fit.kappa_c > 0.0, "fit collapsed to zero coupling", ErrorKind::NonConvergence);

  const double kappa = fit.kappa_c + fit.kappa_i;
  fit.q_tot = fit.omega_0 / kappa;
  fit.q_c = fit.omega_0 / fit.kappa_c;
  if (fit.kappa_i > 0.0) fit.q_i = fit.omega_0 / fit.kappa_i;

  const ResonanceParams best = fit.params();
  const ModelCircle circle = model_circle(best);
  std::vector<Complex> resid(count);
  double radial2 = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    resid[k] = data[k] - s11_model(best, omega[k]);
    const double radial = std::abs(data[k] - circle.center) - circle.radius;
    radial2 += radial * radial;
  }
  fit.residual_rms = std::sqrt(res.cost / static_cast<double>(count));
  fit.circle_deviation = std::sqrt(radial2 / static_cast<double>(count));
  fit.noise_floor = std::max(detail::second_difference_noise(resid), 1e-9 * circle.radius);
  fit.fano_caveat = std::abs(fit.phi_0) > 0.1 || fit.circle_deviation > 5.0 * fit.noise_floor;
  fit.q_i_lower_bound = (!fit.fano_caveat && fit.q_i) ? *fit.q_i : fit.q_tot;

  if (count < 16) fit.warnings.push_back("fewer than 16 points in the trace");
  const double span = omega.back() - omega.front();
  if (span < 3.0 * kappa) fit.warnings.push_back("trace spans fewer than 3 linewidths");
  return fit;
}

}  // namespace jjchain
