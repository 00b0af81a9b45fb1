#pragma once

// Damped (Levenberg-Marquardt) nonlinear least squares with a
// finite-difference Jacobian and Jacobian-based covariance.

#include <functional>
#include <span>
#include <vector>

namespace mimcav {

struct LeastSquaresProblem {
  std::size_t num_residuals = 0;
  /// Writes residuals(params) into out (size num_residuals).
  std::function<void(std::span<const double> params, std::span<double> out)> residuals;
  /// Optional analytic Jacobian, row-major num_residuals x num_params.
  std::function<void(std::span<const double> params, std::span<double> jac)> jacobian;
};

struct LmOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-10;  // relative parameter step
  double initial_damping = 1e-3;
  /// Finite-difference step relative to |param| (absolute floor fd_min_step).
  double fd_relative_step = 1e-7;
  double fd_min_step = 1e-12;
  /// Per-parameter typical scale; used for the difference step when a
  /// parameter sits at zero.
  std::vector<double> scale;
};

struct LmSummary {
  std::vector<double> params;
  std::vector<double> sigma;  // sqrt(diag(cov)) scaled by residual variance
  std::vector<double> covariance;  // row-major p x p
  double cost = 0.0;               // sum of squared residuals
  int iterations = 0;
  bool converged = false;
};

LmSummary levenberg_marquardt(const LeastSquaresProblem& problem, std::vector<double> initial,
                              const LmOptions& options = {});

}  // namespace mimcav
