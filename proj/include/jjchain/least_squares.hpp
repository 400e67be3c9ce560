#pragma once

// Damped Gauss-Newton (Levenberg-Marquardt) for small dense problems.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Dense>

namespace jjchain {

struct LmOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-10;  // relative step size declaring convergence
  double initial_damping = 1e-3;
  double damping_factor = 10.0;
  std::optional<Eigen::VectorXd> lower;  // optional box constraints
  std::optional<Eigen::VectorXd> upper;
};

struct LmResult {
  Eigen::VectorXd x;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd jacobian;
  double cost = 0.0;  // sum of squared residuals
  int iterations = 0;
  bool converged = false;
};

/// Minimizes |r(x)|^2. `residual(x)` returns r, `jacobian(x)` returns dr/dx.
/// The damping term is scaled by diag(J^T J) (Marquardt). Damping grows by
/// `damping_factor` after a rejected step and shrinks by it after an accepted
/// one. Steps are projected onto the box when bounds are given.
template <class Residual, class Jacobian>
LmResult levenberg_marquardt(Residual&& residual, Jacobian&& jacobian, Eigen::VectorXd x,
                             const LmOptions& opt = {}) {
  auto project = [&](Eigen::VectorXd v) {
    if (opt.lower) v = v.cwiseMax(*opt.lower);
    if (opt.upper) v = v.cwiseMin(*opt.upper);
    return v;
  };

  x = project(std::move(x));
  LmResult out;
  out.residuals = residual(x);
  out.cost = out.residuals.squaredNorm();
  out.jacobian = jacobian(x);
  double mu = opt.initial_damping;

  for (out.iterations = 0; out.iterations < opt.max_iterations; ++out.iterations) {
    const Eigen::MatrixXd jtj = out.jacobian.transpose() * out.jacobian;
    const Eigen::VectorXd grad = out.jacobian.transpose() * out.residuals;
    if (out.cost == 0.0 || grad.lpNorm<Eigen::Infinity>() == 0.0) {
      out.converged = true;
      break;
    }

    Eigen::VectorXd diag = jtj.diagonal();
    const double floor = std::max(diag.maxCoeff(), 1.0) * 1e-12;
    diag = diag.cwiseMax(floor);
    Eigen::MatrixXd lhs = jtj;
    lhs.diagonal() += mu * diag;
    const Eigen::VectorXd delta = lhs.ldlt().solve(-grad);
    if (!delta.allFinite()) break;

    const Eigen::VectorXd candidate = project(x + delta);
    const Eigen::VectorXd step = candidate - x;
    const double scale = x.norm() + opt.step_tolerance;

    const Eigen::VectorXd r_new = residual(candidate);
    const double cost_new = r_new.allFinite() ? r_new.squaredNorm()
                                              : std::numeric_limits<double>::infinity();
    if (cost_new < out.cost) {
      x = candidate;
      out.residuals = r_new;
      out.cost = cost_new;
      out.jacobian = jacobian(x);
      mu = std::max(mu / opt.damping_factor, 1e-15);
    } else {
      mu *= opt.damping_factor;
    }
    if (step.norm() <= opt.step_tolerance * scale) {
      out.converged = true;
      ++out.iterations;
      break;
    }
  }
  out.x = x;
  return out;
}

/// Residual-scaled covariance s^2 (J^T J)^{-1}, s^2 = cost / (m - p).
/// Approximate: linearized at the optimum.
inline Eigen::MatrixXd lm_covariance(const LmResult& fit) {
  const auto m = fit.residuals.size();
  const auto p = fit.x.size();
  const double dof = static_cast<double>(std::max<Eigen::Index>(m - p, 1));
  const Eigen::MatrixXd jtj = fit.jacobian.transpose() * fit.jacobian;
  const Eigen::MatrixXd inv = jtj.completeOrthogonalDecomposition().pseudoInverse();
  return inv * (fit.cost / dof);
}

}  // namespace jjchain
