#pragma once

// Fit of the closed-form chain spectrum to an indexed list of observed
// resonances, including the search for the index of the first visible peak.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jjchain/constants.hpp"
#include "jjchain/least_squares.hpp"
#include "jjchain/peaks.hpp"
#include "jjchain/spectrum.hpp"

namespace jjchain {

struct DispersionFitOptions {
  int offset_min = 0;
  int offset_max = 5;
  /// Upper bound on omega_p (rad/s). Needed when the data only probe the
  /// linear part of the dispersion and omega_p runs off to infinity.
  std::optional<double> omega_p_max;
  LmOptions solver{};
};

struct OffsetCandidate {
  int offset;
  double residual_rms;
  bool converged;
};

struct DispersionFit {
  double omega_p;     // rad/s
  double omega_g;     // rad/s
  int index_offset;   // number of modes below the first visible peak
  double residual_rms;  // relative
  Eigen::Matrix2d covariance;  // (omega_p, omega_g), (rad/s)^2
  std::vector<double> predicted_missing_modes;  // rad/s, m = 1 ... index_offset
  int big_n;
  int iterations;
  std::vector<OffsetCandidate> candidates;

  double omega_p_stderr() const { return std::sqrt(covariance(0, 0)); }
  double omega_g_stderr() const { return std::sqrt(covariance(1, 1)); }
  double model(int m) const { return mode_frequency(omega_p, omega_g, m, big_n); }
};

/// Raised when the two best index offsets fit about equally well.
class AmbiguousOffsetError : public Error {
 public:
  AmbiguousOffsetError(DispersionFit best, DispersionFit runner_up)
      : Error(ErrorKind::AmbiguousOffset,
              "index offsets " + std::to_string(best.index_offset) + " and " +
                  std::to_string(runner_up.index_offset) +
                  " give residuals within 5% of each other"),
        best_(std::move(best)),
        runner_up_(std::move(runner_up)) {}

  const DispersionFit& best() const noexcept { return best_; }
  const DispersionFit& runner_up() const noexcept { return runner_up_; }

 private:
  DispersionFit best_;
  DispersionFit runner_up_;
};

namespace detail {

// Fits (omega_p, omega_g) for a fixed index assignment m_k = offset + k.
inline DispersionFit fit_dispersion_at_offset(const std::vector<double>& omega_obs, int big_n,
                                              int offset, const DispersionFitOptions& opt,
                                              double omega_p0, double omega_g0, bool& converged) {
  const std::size_t count = omega_obs.size();
  std::vector<double> lam(count);
  for (std::size_t k = 0; k < count; ++k) {
    lam[k] = laplacian_eigenvalue(offset + static_cast<int>(k) + 1, big_n);
  }

  auto residual = [&](const Eigen::VectorXd& x) {
    const double wp = x[0] * omega_p0;
    const double wg = x[1] * omega_g0;
    const double a = 1.0 / (wg * wg);
    const double b = 1.0 / (wp * wp);
    Eigen::VectorXd r(count);
    for (std::size_t k = 0; k < count; ++k) {
      const double w = std::sqrt(lam[k] / (a + lam[k] * b));
      r[k] = (w - omega_obs[k]) / omega_obs[k];
    }
    return r;
  };
  auto jacobian = [&](const Eigen::VectorXd& x) {
    const double wp = x[0] * omega_p0;
    const double wg = x[1] * omega_g0;
    const double a = 1.0 / (wg * wg);
    const double b = 1.0 / (wp * wp);
    Eigen::MatrixXd j(count, 2);
    for (std::size_t k = 0; k < count; ++k) {
      const double den = a + lam[k] * b;
      const double w = std::sqrt(lam[k] / den);
      j(k, 0) = w * lam[k] / (wp * wp * wp * den) * omega_p0 / omega_obs[k];
      j(k, 1) = w / (wg * wg * wg * den) * omega_g0 / omega_obs[k];
    }
    return j;
  };

  LmOptions lm = opt.solver;
  lm.lower = Eigen::Vector2d(1e-6, 1e-6);
  lm.upper = Eigen::Vector2d(
      opt.omega_p_max ? *opt.omega_p_max / omega_p0 : std::numeric_limits<double>::infinity(),
      std::numeric_limits<double>::infinity());

  const LmResult res = levenberg_marquardt(residual, jacobian, Eigen::Vector2d(1.0, 1.0), lm);
  converged = res.converged;

  const Eigen::MatrixXd cov_scaled = lm_covariance(res);
  const Eigen::Vector2d scale(omega_p0, omega_g0);
  DispersionFit fit{};
  fit.omega_p = res.x[0] * omega_p0;
  fit.omega_g = res.x[1] * omega_g0;
  fit.index_offset = offset;
  fit.residual_rms = std::sqrt(res.cost / static_cast<double>(count));
  fit.covariance = scale.asDiagonal() * cov_scaled * scale.asDiagonal();
  fit.big_n = big_n;
  fit.iterations = res.iterations;
  for (int m = 1; m <= offset; ++m) {
    fit.predicted_missing_modes.push_back(mode_frequency(fit.omega_p, fit.omega_g, m, big_n));
  }
  return fit;
}

}  // namespace detail

/// Assigns mode indices offset + 1, ..., offset + K to the K sorted peaks for
/// every offset in the search range, fits omega_p and omega_g by damped
/// Gauss-Newton on relative frequency residuals, and keeps the offset with
/// the smallest residual.
///
/// Initial guess: omega_g from N times the median peak spacing over pi,
/// omega_p at 1.05 times the highest peak.
inline DispersionFit fit_dispersion(const PeakList& peaks, int big_n,
                                    const DispersionFitOptions& opt = {}) {
  const auto& f = peaks.peak_frequencies;
  detail::require(f.size() >= 3, "dispersion fit needs at least 3 peaks");
  detail::require(opt.offset_min >= 0 && opt.offset_max >= opt.offset_min,
                  "invalid index offset range");
  detail::require(big_n > static_cast<int>(f.size()) + opt.offset_max,
                  "N must exceed the peak count plus the largest index offset");
  for (std::size_t k = 0; k < f.size(); ++k) {
    detail::require(std::isfinite(f[k]) && f[k] > 0.0, "peak frequencies must be positive");
    if (k > 0) detail::require(f[k] > f[k - 1], "peak frequencies must strictly increase");
  }
  if (opt.omega_p_max) detail::require(*opt.omega_p_max > 0.0, "omega_p bound must be positive");

  std::vector<double> omega(f.size());
  std::transform(f.begin(), f.end(), omega.begin(), [](double hz) { return constants::two_pi * hz; });

  std::vector<double> spacing;
  for (std::size_t k = 1; k < omega.size(); ++k) spacing.push_back(omega[k] - omega[k - 1]);
  const double omega_g0 = big_n * detail::median(spacing) / std::numbers::pi;
  double omega_p0 = 1.05 * omega.back();
  if (opt.omega_p_max) omega_p0 = std::min(omega_p0, *opt.omega_p_max);

  std::vector<DispersionFit> fits;
  std::vector<OffsetCandidate> candidates;
  for (int offset = opt.offset_min; offset <= opt.offset_max; ++offset) {
    bool converged = false;
    DispersionFit fit =
        detail::fit_dispersion_at_offset(omega, big_n, offset, opt, omega_p0, omega_g0, converged);
    candidates.push_back({offset, fit.residual_rms, converged});
    if (converged && std::isfinite(fit.residual_rms)) fits.push_back(std::move(fit));
  }
  if (fits.empty()) {
    throw Error(ErrorKind::NonConvergence, "dispersion fit did not converge for any index offset");
  }

  std::stable_sort(fits.begin(), fits.end(), [](const DispersionFit& a, const DispersionFit& b) {
    return a.residual_rms < b.residual_rms;
  });
  for (DispersionFit& fit : fits) fit.candidates = candidates;

  if (fits.size() > 1) {
    const double best = fits[0].residual_rms;
    const double next = fits[1].residual_rms;
    if (next - best < 0.05 * next) throw AmbiguousOffsetError(fits[0], fits[1]);
  }
  return fits.front();
}

}  // namespace jjchain
