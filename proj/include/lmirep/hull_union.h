#pragma once

// Convex hull of a union of SDP-representable sets W_1..W_m.
//
// Given W_k = {x : A^(k) + sum_i x_i B_i^(k) + sum_j u_j C_j^(k) >= 0}, the
// output lifts x with branch copies (x^(k), u^(k)) and weights lambda:
//
//   lambda_k A^(k) + sum_i x^(k)_i B_i^(k) + sum_j u^(k)_j C_j^(k) >= 0,
//   lambda >= 0,  sum_k lambda_k = 1,  x = sum_k x^(k).
//
// Its projection contains conv(W_1 u ... u W_m), has the same closure, and
// equals it when every W_k is bounded.

#include <cstdint>
#include <vector>

#include "lmirep/lift_sdp.h"
#include "lmirep/sets.h"

namespace lmirep {

struct UnionOptions {
  /// Probe each input with support problems along +-e_i and flag inputs that
  /// look unbounded in the output metadata. Costs 2n solves per input.
  bool probe_boundedness = false;
  SdpOptions sdp;
};

struct UnionLift {
  std::vector<LiftedRepresentation> inputs;
  LiftedRepresentation output;

  /// Offsets into the output's lifted vector u.
  int branch_x_offset(int k) const;
  int branch_u_offset(int k) const;
  int lambda_offset() const;

  MembershipResult membership(const Eigen::VectorXd& x, double tol = kDefaultMembershipTol,
                              const SdpOptions& opts = {}) const;
};

/// Throws std::invalid_argument for an empty list and DimensionError when
/// the inputs disagree on n.
UnionLift build_union(const std::vector<LiftedRepresentation>& reps, const UnionOptions& opts = {});

/// Support values along +-e_i; indices of directions reported Unbounded or
/// unresolved. Empty means no evidence of unboundedness along the axes.
std::vector<int> unbounded_axes(const LiftedRepresentation& rep, const SdpOptions& opts = {});

}  // namespace lmirep
