#include "mimcav/least_squares.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "mimcav/errors.hpp"

namespace mimcav {

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

double sum_squares(const Vector& r) { return r.squaredNorm(); }

struct Evaluator {
  const LeastSquaresProblem& problem;
  const LmOptions& options;
  std::size_t p;

  Vector residuals(const std::vector<double>& x) const {
    Vector r(problem.num_residuals);
    problem.residuals(x, std::span<double>(r.data(), r.size()));
    return r;
  }

  Matrix jacobian(const std::vector<double>& x, const Vector& r0) const {
    Matrix j(problem.num_residuals, p);
    if (problem.jacobian) {
      problem.jacobian(x, std::span<double>(j.data(), j.size()));
      return j;
    }
    std::vector<double> xp = x;
    for (std::size_t k = 0; k < p; ++k) {
      const double typical = k < options.scale.size() ? options.scale[k] : 0.0;
      const double h = std::max({options.fd_relative_step * std::abs(x[k]), options.fd_relative_step * typical,
                                 options.fd_min_step});
      xp[k] = x[k] + h;
      const Vector rp = residuals(xp);
      xp[k] = x[k] - h;
      const Vector rm = residuals(xp);
      xp[k] = x[k];
      j.col(k) = (rp - rm) / (2.0 * h);
    }
    (void)r0;
    return j;
  }
};

}  // namespace

LmSummary levenberg_marquardt(const LeastSquaresProblem& problem, std::vector<double> initial,
                              const LmOptions& options) {
  if (!problem.residuals) throw DomainError("least-squares problem has no residual function");
  const std::size_t p = initial.size();
  const std::size_t m = problem.num_residuals;
  if (p == 0) throw DomainError("least-squares problem has no parameters");
  if (m < p) throw DomainError("fewer residuals than parameters");

  Evaluator eval{problem, options, p};
  std::vector<double> x = std::move(initial);
  Vector r = eval.residuals(x);
  double cost = sum_squares(r);
  if (!std::isfinite(cost)) throw DomainError("residuals are not finite at the initial guess");

  double lambda = options.initial_damping;
  LmSummary out;
  Matrix j = eval.jacobian(x, r);

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const Matrix jtj = j.transpose() * j;
    const Vector g = j.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() == 0.0 || cost == 0.0) {
      out.converged = true;
      break;
    }

    bool accepted = false;
    double rel_step = 0.0;
    for (int tries = 0; tries < 30; ++tries) {
      Matrix a = jtj;
      for (std::size_t k = 0; k < p; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-300);
      const Vector delta = a.ldlt().solve(-g);
      std::vector<double> trial = x;
      double step_norm = 0.0;
      double x_norm = 0.0;
      for (std::size_t k = 0; k < p; ++k) {
        trial[k] += delta[k];
        step_norm += delta[k] * delta[k];
        x_norm += x[k] * x[k];
      }
      rel_step = std::sqrt(step_norm) / (std::sqrt(x_norm) + 1e-300);
      const Vector rt = eval.residuals(trial);
      const double ct = sum_squares(rt);
      if (std::isfinite(ct) && ct <= cost) {
        x = std::move(trial);
        r = rt;
        cost = ct;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 4.0;
      if (rel_step < options.step_tolerance) break;
    }
    if (rel_step < options.step_tolerance) {
      out.converged = true;
      ++it;
      break;
    }
    if (!accepted) break;
    j = eval.jacobian(x, r);
  }

  out.params = x;
  out.cost = cost;
  out.iterations = it;

  // Covariance (J^T J)^{-1} s^2 at the optimum.
  j = eval.jacobian(x, r);
  const Matrix jtj = j.transpose() * j;
  const double dof = m > p ? static_cast<double>(m - p) : 1.0;
  const double s2 = cost / dof;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(jtj);
  const Matrix cov = cod.pseudoInverse() * s2;
  out.covariance.assign(cov.data(), cov.data() + cov.size());
  out.sigma.resize(p);
  for (std::size_t k = 0; k < p; ++k) out.sigma[k] = std::sqrt(std::max(cov(k, k), 0.0));
  return out;
}

}  // namespace mimcav
