#pragma once

// Local minimization of a polynomial over {h_i >= 0, c_k = 0}.
//
// Outer loop: Powell-Hestenes-Rockafellar augmented Lagrangian. Inner loop:
// BFGS with Armijo backtracking. A final Newton pass on the KKT system of the
// detected active set sharpens the point, and multipliers are refit by
// nonnegative least squares so the reported KKT residual does not depend on
// the path taken.

#include <vector>

#include <Eigen/Dense>

#include "lmirep/polynomial.h"

namespace lmirep {

struct NlpProblem {
  int n = 0;
  Polynomial objective;
  std::vector<Polynomial> inequalities;
  std::vector<Polynomial> equalities;
};

struct LocalOptions {
  /// Stationarity tolerance of the inner solves at the last outer iteration.
  double tol = 1e-9;
  double feas_tol = 1e-9;
  int max_outer = 60;
  int max_inner = 500;
  double rho0 = 10.0;
  /// Constraints with |h_i| below this (scaled) are treated as active when
  /// polishing and fitting multipliers.
  double active_tol = 1e-6;
  bool polish = true;
};

struct LocalResult {
  Eigen::VectorXd x;
  double value = 0.0;
  bool converged = false;
  /// max(max_i -h_i, max_k |c_k|), clipped at 0.
  double max_violation = 0.0;
  /// ||grad f - J_A^T lambda - J_E^T mu|| / (1 + ||grad f||).
  double kkt_residual = 0.0;
  Eigen::VectorXd ineq_multipliers;
  Eigen::VectorXd eq_multipliers;
  std::vector<int> active;
  int iterations = 0;
};

LocalResult minimize_local(const NlpProblem& p, const Eigen::VectorXd& x0,
                           const LocalOptions& opts = {});

/// Best converged run (lowest value); if none converged, the least violated.
LocalResult minimize_multistart(const NlpProblem& p, const std::vector<Eigen::VectorXd>& starts,
                                const LocalOptions& opts = {});

struct KktFit {
  Eigen::VectorXd ineq;
  Eigen::VectorXd eq;
  std::vector<int> active;
  double residual = 0.0;
};

/// Least-squares multipliers at x: lambda_i >= 0 on the active inequalities,
/// mu free.
KktFit fit_multipliers(const NlpProblem& p, const Eigen::VectorXd& x, double active_tol = 1e-6);

/// grad^2 f - sum lambda_i grad^2 h_i - sum mu_k grad^2 c_k.
Eigen::MatrixXd lagrangian_hessian(const NlpProblem& p, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& ineq_mult,
                                   const Eigen::VectorXd& eq_mult);

/// Lawson-Hanson: min ||A y - b|| with y_j >= 0 where nonneg[j], else free.
Eigen::VectorXd bounded_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                      const std::vector<bool>& nonneg);

}  // namespace lmirep
