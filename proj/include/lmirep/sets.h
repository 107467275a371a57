#pragma once

// Semialgebraic sets and lifted LMI representations.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "lmirep/polynomial.h"

namespace lmirep {

/// {x in R^n : f_k(x) = 0, h_j(x) >= 0}.
struct BasicSet {
  int n = 0;
  std::string name;
  std::vector<Polynomial> equalities;
  std::vector<Polynomial> inequalities;

  BasicSet() = default;
  BasicSet(int dim, std::vector<Polynomial> ineqs, std::vector<Polynomial> eqs = {},
           std::string label = {});

  /// Throws DimensionError / std::invalid_argument when the invariants fail.
  void validate() const;
  int num_constraints() const {
    return static_cast<int>(equalities.size() + inequalities.size());
  }
};

/// Finite union of basic sets sharing one ambient dimension.
struct UnionSet {
  int n = 0;
  std::vector<BasicSet> blocks;

  UnionSet() = default;
  explicit UnionSet(std::vector<BasicSet> bs);
  static UnionSet single(BasicSet b) { return UnionSet({std::move(b)}); }

  void validate() const;
};

/// Coefficient-scaled default tolerance for activity/membership tests.
inline constexpr double kDefaultActiveTol = 1e-7;

/// Direct evaluation: every equality within tol and every inequality >= -tol,
/// each tolerance scaled by max(1, largest coefficient of the polynomial).
bool membership(const BasicSet& s, const Eigen::VectorXd& x, double tol = kDefaultActiveTol);
bool membership(const UnionSet& s, const Eigen::VectorXd& x, double tol = kDefaultActiveTol);

/// min_j h_j(x) and -|f_k(x)| folded together; >= 0 exactly on the set.
double depth(const BasicSet& s, const Eigen::VectorXd& x);
/// max over blocks of depth().
double depth(const UnionSet& s, const Eigen::VectorXd& x);

/// Indices i with |h_i(u)| <= tol * max(1, max|coef(h_i)|).
std::vector<int> active_constraints(const BasicSet& s, const Eigen::VectorXd& u,
                                    double tol = kDefaultActiveTol);

/// Closed ball B(center, radius).
struct BallConstraint {
  Eigen::VectorXd center;
  double radius = 1.0;

  BallConstraint(Eigen::VectorXd c, double r);
  /// delta^2 - ||x - u||^2.
  Polynomial polynomial() const;
};

/// s with delta^2 - ||x - u||^2 >= 0 appended.
BasicSet intersect_ball(const BasicSet& s, const BallConstraint& b);

/// A0 + sum_i x_i Ax[i] + sum_j u_j Bu[j] >= 0, all matrices symmetric.
struct LinearPencil {
  int size = 0;
  Eigen::MatrixXd A0;
  std::vector<Eigen::MatrixXd> Ax;
  std::vector<Eigen::MatrixXd> Bu;

  LinearPencil() = default;
  LinearPencil(int sz, int n, int num_lifted);

  Eigen::MatrixXd value(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
  void validate(int n, int num_lifted) const;
};

/// Pencil of size n+1 encoding ||x - u|| <= delta by a Schur complement:
/// [[I_n, x - u], [(x - u)^T, delta^2]] >= 0.
LinearPencil ball_pencil(const BallConstraint& b);

/// coeffs . (x, u) + constant = 0.
struct AffineEquality {
  Eigen::VectorXd coeffs;
  double constant = 0.0;

  double value(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
};

/// Projection onto x of {(x, u) : every pencil >= 0, every equality holds}.
struct LiftedRepresentation {
  int n = 0;
  int num_lifted = 0;
  std::vector<LinearPencil> pencils;
  std::vector<AffineEquality> equalities;
  nlohmann::json metadata = nlohmann::json::object();

  LiftedRepresentation() = default;
  LiftedRepresentation(int dim, int lifted) : n(dim), num_lifted(lifted) {}

  void validate() const;
  int num_variables() const { return n + num_lifted; }
  /// Smallest eigenvalue over all pencils at (x, u); +inf with no pencils.
  double min_eigenvalue(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
  double max_equality_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
};

}  // namespace lmirep
