#include "lmirep/sets.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lmirep {

namespace {

double coef_scale(const Polynomial& p) { return std::max(1.0, p.max_abs_coefficient()); }

bool is_symmetric(const Eigen::MatrixXd& m) {
  return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + m.cwiseAbs().maxCoeff());
}

}  // namespace

BasicSet::BasicSet(int dim, std::vector<Polynomial> ineqs, std::vector<Polynomial> eqs,
                   std::string label)
    : n(dim), name(std::move(label)), equalities(std::move(eqs)), inequalities(std::move(ineqs)) {
  validate();
}

void BasicSet::validate() const {
  if (n <= 0) throw DimensionError("BasicSet: nonpositive dimension");
  if (equalities.empty() && inequalities.empty()) {
    throw std::invalid_argument("BasicSet: no constraints");
  }
  for (const auto& p : equalities) {
    if (p.dim() != n) throw DimensionError("BasicSet: equality dimension mismatch");
  }
  for (const auto& p : inequalities) {
    if (p.dim() != n) throw DimensionError("BasicSet: inequality dimension mismatch");
  }
}

UnionSet::UnionSet(std::vector<BasicSet> bs) : blocks(std::move(bs)) {
  if (blocks.empty()) throw std::invalid_argument("UnionSet: no blocks");
  n = blocks.front().n;
  validate();
}

void UnionSet::validate() const {
  if (blocks.empty()) throw std::invalid_argument("UnionSet: no blocks");
  for (const auto& b : blocks) {
    b.validate();
    if (b.n != n) throw DimensionError("UnionSet: blocks differ in dimension");
  }
}

bool membership(const BasicSet& s, const Eigen::VectorXd& x, double tol) {
  if (x.size() != s.n) throw DimensionError("membership: point dimension mismatch");
  for (const auto& f : s.equalities) {
    if (std::abs(f.eval(x)) > tol * coef_scale(f)) return false;
  }
  for (const auto& h : s.inequalities) {
    if (h.eval(x) < -tol * coef_scale(h)) return false;
  }
  return true;
}

bool membership(const UnionSet& s, const Eigen::VectorXd& x, double tol) {
  return std::any_of(s.blocks.begin(), s.blocks.end(),
                     [&](const BasicSet& b) { return membership(b, x, tol); });
}

double depth(const BasicSet& s, const Eigen::VectorXd& x) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& f : s.equalities) d = std::min(d, -std::abs(f.eval(x)));
  for (const auto& h : s.inequalities) d = std::min(d, h.eval(x));
  return d;
}

double depth(const UnionSet& s, const Eigen::VectorXd& x) {
  double d = -std::numeric_limits<double>::infinity();
  for (const auto& b : s.blocks) d = std::max(d, depth(b, x));
  return d;
}

std::vector<int> active_constraints(const BasicSet& s, const Eigen::VectorXd& u, double tol) {
  if (u.size() != s.n) throw DimensionError("active_constraints: point dimension mismatch");
  std::vector<int> out;
  for (size_t i = 0; i < s.inequalities.size(); ++i) {
    const auto& h = s.inequalities[i];
    if (std::abs(h.eval(u)) <= tol * coef_scale(h)) out.push_back(static_cast<int>(i));
  }
  return out;
}

BallConstraint::BallConstraint(Eigen::VectorXd c, double r) : center(std::move(c)), radius(r) {
  if (!(radius > 0.0)) throw std::invalid_argument("BallConstraint: radius must be positive");
  if (center.size() == 0) throw DimensionError("BallConstraint: empty center");
}

Polynomial BallConstraint::polynomial() const {
  const int n = static_cast<int>(center.size());
  Polynomial p = Polynomial::constant(n, radius * radius);
  for (int i = 0; i < n; ++i) {
    Polynomial d = Polynomial::variable(n, i) - Polynomial::constant(n, center(i));
    p -= d * d;
  }
  return p;
}

BasicSet intersect_ball(const BasicSet& s, const BallConstraint& b) {
  if (b.center.size() != s.n) throw DimensionError("intersect_ball: dimension mismatch");
  BasicSet out = s;
  out.inequalities.push_back(b.polynomial());
  return out;
}

LinearPencil::LinearPencil(int sz, int n, int num_lifted)
    : size(sz),
      A0(Eigen::MatrixXd::Zero(sz, sz)),
      Ax(static_cast<size_t>(n), Eigen::MatrixXd::Zero(sz, sz)),
      Bu(static_cast<size_t>(num_lifted), Eigen::MatrixXd::Zero(sz, sz)) {}

Eigen::MatrixXd LinearPencil::value(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  Eigen::MatrixXd m = A0;
  for (size_t i = 0; i < Ax.size(); ++i) {
    if (x(static_cast<Eigen::Index>(i)) != 0.0) m += x(static_cast<Eigen::Index>(i)) * Ax[i];
  }
  for (size_t j = 0; j < Bu.size(); ++j) {
    if (u(static_cast<Eigen::Index>(j)) != 0.0) m += u(static_cast<Eigen::Index>(j)) * Bu[j];
  }
  return m;
}

void LinearPencil::validate(int n, int num_lifted) const {
  if (size <= 0) throw std::invalid_argument("LinearPencil: nonpositive size");
  if (static_cast<int>(Ax.size()) != n) throw DimensionError("LinearPencil: Ax length != n");
  if (static_cast<int>(Bu.size()) != num_lifted) {
    throw DimensionError("LinearPencil: Bu length != num_lifted");
  }
  auto check = [&](const Eigen::MatrixXd& m) {
    if (m.rows() != size || m.cols() != size) throw DimensionError("LinearPencil: matrix size");
    if (!is_symmetric(m)) throw std::invalid_argument("LinearPencil: matrix not symmetric");
  };
  check(A0);
  for (const auto& m : Ax) check(m);
  for (const auto& m : Bu) check(m);
}

LinearPencil ball_pencil(const BallConstraint& b) {
  const int n = static_cast<int>(b.center.size());
  LinearPencil p(n + 1, n, 0);
  p.A0.topLeftCorner(n, n).setIdentity();
  p.A0.block(0, n, n, 1) = -b.center;
  p.A0.block(n, 0, 1, n) = -b.center.transpose();
  p.A0(n, n) = b.radius * b.radius;
  for (int i = 0; i < n; ++i) {
    p.Ax[static_cast<size_t>(i)](i, n) = 1.0;
    p.Ax[static_cast<size_t>(i)](n, i) = 1.0;
  }
  return p;
}

double AffineEquality::value(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  const Eigen::Index n = x.size();
  return coeffs.head(n).dot(x) + coeffs.tail(coeffs.size() - n).dot(u) + constant;
}

void LiftedRepresentation::validate() const {
  if (n <= 0) throw DimensionError("LiftedRepresentation: nonpositive dimension");
  if (num_lifted < 0) throw DimensionError("LiftedRepresentation: negative lifted count");
  for (const auto& p : pencils) p.validate(n, num_lifted);
  for (const auto& e : equalities) {
    if (e.coeffs.size() != n + num_lifted) {
      throw DimensionError("LiftedRepresentation: equality length mismatch");
    }
  }
}

double LiftedRepresentation::min_eigenvalue(const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& u) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : pencils) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.value(x, u), Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues().minCoeff());
  }
  return m;
}

double LiftedRepresentation::max_equality_residual(const Eigen::VectorXd& x,
                                                   const Eigen::VectorXd& u) const {
  double r = 0.0;
  for (const auto& e : equalities) r = std::max(r, std::abs(e.value(x, u)));
  return r;
}

}  // namespace lmirep
