#include "lmirep/lift_sdp.h"

#include <cmath>

namespace lmirep {

namespace {

bool nonzero(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff() > 0.0; }

}  // namespace

SdpProblem support_problem(const LiftedRepresentation& rep, const Eigen::VectorXd& l) {
  rep.validate();
  if (l.size() != rep.n) throw DimensionError("support_problem: direction dimension mismatch");
  const int n = rep.n;
  SdpProblem p(rep.num_variables());
  p.objective.head(n) = l;
  for (const auto& pen : rep.pencils) {
    SdpBlock b(pen.size);
    b.constant = pen.A0;
    for (int i = 0; i < n; ++i) {
      if (nonzero(pen.Ax[static_cast<size_t>(i)])) b.terms.emplace_back(i, pen.Ax[static_cast<size_t>(i)]);
    }
    for (int j = 0; j < rep.num_lifted; ++j) {
      if (nonzero(pen.Bu[static_cast<size_t>(j)])) b.terms.emplace_back(n + j, pen.Bu[static_cast<size_t>(j)]);
    }
    p.blocks.push_back(std::move(b));
  }
  for (const auto& e : rep.equalities) p.add_equality(e.coeffs, -e.constant);
  return p;
}

SdpProblem fixed_x_problem(const LiftedRepresentation& rep, const Eigen::VectorXd& x) {
  rep.validate();
  if (x.size() != rep.n) throw DimensionError("fixed_x_problem: point dimension mismatch");
  const int n = rep.n;
  SdpProblem p(rep.num_lifted);
  for (const auto& pen : rep.pencils) {
    SdpBlock b(pen.size);
    b.constant = pen.A0;
    for (int i = 0; i < n; ++i) b.constant += x(i) * pen.Ax[static_cast<size_t>(i)];
    for (int j = 0; j < rep.num_lifted; ++j) {
      if (nonzero(pen.Bu[static_cast<size_t>(j)])) b.terms.emplace_back(j, pen.Bu[static_cast<size_t>(j)]);
    }
    p.blocks.push_back(std::move(b));
  }
  for (const auto& e : rep.equalities) {
    p.add_equality(e.coeffs.tail(rep.num_lifted), -e.constant - e.coeffs.head(n).dot(x));
  }
  return p;
}

const char* to_string(Membership m) {
  switch (m) {
    case Membership::Inside: return "inside";
    case Membership::Outside: return "outside";
    case Membership::Indeterminate: return "indeterminate";
  }
  return "?";
}

MembershipResult lift_membership(const LiftedRepresentation& rep, const Eigen::VectorXd& x,
                                 double tol, const SdpOptions& opts) {
  MembershipResult out;
  const SdpProblem p = fixed_x_problem(rep, x);
  if (p.num_vars == 0 || (p.blocks.empty() && p.num_equalities() == 0)) {
    // Nothing to search over: evaluate directly.
    const Eigen::VectorXd u = Eigen::VectorXd::Zero(rep.num_lifted);
    double margin = -rep.min_eigenvalue(x, u);
    if (!std::isfinite(margin)) margin = 0.0;
    margin = std::max(margin, rep.max_equality_residual(x, u));
    out.margin = margin;
    out.verdict = margin <= tol ? Membership::Inside : Membership::Outside;
    if (out.verdict == Membership::Inside) out.u = u;
    return out;
  }
  const FeasibilityResult f = feasible_point(p, opts);
  out.margin = f.margin;
  if (f.status == SdpStatus::NumericalTrouble) {
    out.verdict = Membership::Indeterminate;
    return out;
  }
  out.verdict = f.margin <= tol ? Membership::Inside : Membership::Outside;
  if (f.point) out.u = *f.point;
  return out;
}

}  // namespace lmirep
