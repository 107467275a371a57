#pragma once

// Dense primal-dual interior-point solver for
//
//   minimize    c^T z
//   subject to  F0_b + sum_i z_i F_ib  >= 0   for every block b
//               A z = b
//
// with z free. The conic dual is
//
//   maximize    -sum_b <F0_b, X_b> + b^T w
//   subject to  sum_b <F_ib, X_b> + (A^T w)_i = c_i,   X_b >= 0.
//
// Iterations follow an infeasible Mehrotra predictor-corrector path with
// Nesterov-Todd scaling. Infeasibility and unboundedness are classified after
// the main run by two auxiliary solves (a phase-I margin problem and a
// recession-direction problem); a run that neither converges nor yields a
// clean certificate is reported as NumericalTrouble.

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lmirep {

struct SdpBlock {
  int size = 0;
  Eigen::MatrixXd constant;
  /// Sparse in the variables: (variable index, coefficient matrix).
  std::vector<std::pair<int, Eigen::MatrixXd>> terms;

  explicit SdpBlock(int sz = 0) : size(sz), constant(Eigen::MatrixXd::Zero(sz, sz)) {}
  /// Adds m to the coefficient of z_var (merging with an existing term).
  void add_term(int var, const Eigen::MatrixXd& m);
  Eigen::MatrixXd value(const Eigen::VectorXd& z) const;
};

struct SdpProblem {
  int num_vars = 0;
  Eigen::VectorXd objective;
  std::vector<SdpBlock> blocks;
  Eigen::MatrixXd eq_matrix;  // rows x num_vars
  Eigen::VectorXd eq_rhs;

  explicit SdpProblem(int nv = 0);
  void add_equality(const Eigen::VectorXd& row, double rhs);
  /// Throws std::invalid_argument on malformed data.
  void validate() const;
  int num_equalities() const { return static_cast<int>(eq_matrix.rows()); }
};

enum class SdpStatus { Optimal, Infeasible, Unbounded, NumericalTrouble };

const char* to_string(SdpStatus s);

struct SdpOptions {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iterations = 200;
  /// A recession direction with c^T d below -unbounded_tol (with |d_i| <= 1)
  /// certifies unboundedness of a feasible problem.
  double unbounded_tol = 1e-6;
  /// One line per iteration: iter, gap, residuals, step lengths.
  std::ostream* trace = nullptr;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalTrouble;
  Eigen::VectorXd z;
  std::vector<Eigen::MatrixXd> dual_blocks;
  Eigen::VectorXd eq_multipliers;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  /// |p - d| / (1 + |p| + |d|).
  double relative_gap = 0.0;
  /// Relative residuals of the final iterate (block slack, equalities, dual).
  double primal_residual = 0.0;
  double equality_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;

  double max_kkt_residual() const;
};

SdpSolution solve(const SdpProblem& p, const SdpOptions& opts = {});

struct FeasibilityResult {
  SdpStatus status = SdpStatus::NumericalTrouble;
  /// Present when every residual is within feas_tol.
  std::optional<Eigen::VectorXd> point;
  /// Optimal phase-I value t* of min t s.t. F(z) + t I >= 0, Az = b. Positive
  /// values bound the infeasibility; t* <= feas_tol means feasible.
  double margin = 0.0;
};

/// Phase-I search. The margin variable is bounded below by -1, so strictly
/// feasible problems report a margin of at least -1.
FeasibilityResult feasible_point(const SdpProblem& p, const SdpOptions& opts = {});

/// Smallest eigenvalue over all blocks at z.
double min_block_eigenvalue(const SdpProblem& p, const Eigen::VectorXd& z);

}  // namespace lmirep
