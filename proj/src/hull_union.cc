#include "lmirep/hull_union.h"

#include <stdexcept>

namespace lmirep {

int UnionLift::branch_x_offset(int k) const {
  int off = 0;
  for (int j = 0; j < k; ++j) off += output.n + inputs[static_cast<size_t>(j)].num_lifted;
  return off;
}

int UnionLift::branch_u_offset(int k) const { return branch_x_offset(k) + output.n; }

int UnionLift::lambda_offset() const { return branch_x_offset(static_cast<int>(inputs.size())); }

MembershipResult UnionLift::membership(const Eigen::VectorXd& x, double tol,
                                       const SdpOptions& opts) const {
  return lift_membership(output, x, tol, opts);
}

std::vector<int> unbounded_axes(const LiftedRepresentation& rep, const SdpOptions& opts) {
  std::vector<int> out;
  for (int i = 0; i < rep.n; ++i) {
    for (double sgn : {1.0, -1.0}) {
      Eigen::VectorXd l = Eigen::VectorXd::Zero(rep.n);
      l(i) = sgn;
      const SdpSolution s = solve(support_problem(rep, l), opts);
      if (s.status != SdpStatus::Optimal) {
        out.push_back(sgn > 0 ? i : -(i + 1));
      }
    }
  }
  return out;
}

UnionLift build_union(const std::vector<LiftedRepresentation>& reps, const UnionOptions& opts) {
  if (reps.empty()) throw std::invalid_argument("build_union: no input representations");
  const int n = reps.front().n;
  for (const auto& r : reps) {
    r.validate();
    if (r.n != n) throw DimensionError("build_union: inputs differ in dimension");
  }
  UnionLift ul;
  ul.inputs = reps;
  const int m = static_cast<int>(reps.size());
  int lifted = m;
  for (const auto& r : reps) lifted += n + r.num_lifted;
  LiftedRepresentation& out = ul.output;
  out = LiftedRepresentation(n, lifted);
  const int lam = ul.lambda_offset();

  nlohmann::json branches = nlohmann::json::array();
  for (int k = 0; k < m; ++k) {
    const LiftedRepresentation& r = reps[static_cast<size_t>(k)];
    const int xo = ul.branch_x_offset(k);
    const int uo = ul.branch_u_offset(k);
    for (const auto& pen : r.pencils) {
      LinearPencil p(pen.size, n, lifted);
      p.Bu[static_cast<size_t>(lam + k)] = pen.A0;
      for (int i = 0; i < n; ++i) p.Bu[static_cast<size_t>(xo + i)] = pen.Ax[static_cast<size_t>(i)];
      for (int j = 0; j < r.num_lifted; ++j) {
        p.Bu[static_cast<size_t>(uo + j)] = pen.Bu[static_cast<size_t>(j)];
      }
      out.pencils.push_back(std::move(p));
    }
    for (const auto& e : r.equalities) {
      AffineEquality h;
      h.coeffs = Eigen::VectorXd::Zero(n + lifted);
      h.coeffs.segment(n + xo, n) = e.coeffs.head(n);
      h.coeffs.segment(n + uo, r.num_lifted) = e.coeffs.tail(r.num_lifted);
      h.coeffs(n + lam + k) = e.constant;
      out.equalities.push_back(std::move(h));
    }
    nlohmann::json b;
    b["num_lifted"] = r.num_lifted;
    b["pencils"] = r.pencils.size();
    b["equalities"] = r.equalities.size();
    if (!r.metadata.empty()) b["metadata"] = r.metadata;
    branches.push_back(std::move(b));
  }

  LinearPencil simplex(m, n, lifted);
  for (int k = 0; k < m; ++k) simplex.Bu[static_cast<size_t>(lam + k)](k, k) = 1.0;
  out.pencils.push_back(std::move(simplex));

  AffineEquality sum;
  sum.coeffs = Eigen::VectorXd::Zero(n + lifted);
  sum.coeffs.segment(n + lam, m).setOnes();
  sum.constant = -1.0;
  out.equalities.push_back(std::move(sum));

  for (int i = 0; i < n; ++i) {
    AffineEquality e;
    e.coeffs = Eigen::VectorXd::Zero(n + lifted);
    e.coeffs(i) = 1.0;
    for (int k = 0; k < m; ++k) e.coeffs(n + ul.branch_x_offset(k) + i) = -1.0;
    out.equalities.push_back(std::move(e));
  }

  out.metadata["construction"] = "hull_union";
  out.metadata["branches"] = std::move(branches);
  out.metadata["lambda_offset"] = lam;
  if (opts.probe_boundedness) {
    nlohmann::json flagged = nlohmann::json::array();
    for (int k = 0; k < m; ++k) {
      if (!unbounded_axes(reps[static_cast<size_t>(k)], opts.sdp).empty()) flagged.push_back(k);
    }
    out.metadata["possibly_unbounded_inputs"] = flagged;
    if (!flagged.empty()) {
      out.metadata["warning"] =
          "some inputs look unbounded; the projection is only guaranteed to have the hull's closure";
    }
  }
  return ul;
}

}  // namespace lmirep
