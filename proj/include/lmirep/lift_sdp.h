#pragma once

// Turning lifted representations into SDPs: linear minimization over the
// lift and feasibility of the lift at a fixed x.

#include <optional>

#include <Eigen/Dense>

#include "lmirep/sdp.h"
#include "lmirep/sets.h"

namespace lmirep {

/// Decision vector z = (x, u); objective l^T x.
SdpProblem support_problem(const LiftedRepresentation& rep, const Eigen::VectorXd& l);

/// Decision vector z = u with x substituted; zero objective.
SdpProblem fixed_x_problem(const LiftedRepresentation& rep, const Eigen::VectorXd& x);

enum class Membership { Inside, Outside, Indeterminate };

const char* to_string(Membership m);

struct MembershipResult {
  Membership verdict = Membership::Indeterminate;
  /// Phase-I value: the smallest t with every pencil + t I >= 0 for some u.
  double margin = 0.0;
  std::optional<Eigen::VectorXd> u;
};

inline constexpr double kDefaultMembershipTol = 1e-6;

/// Inside when some u brings every pencil within `tol` of PSD (phase-I
/// margin <= tol); Outside when the margin exceeds tol; Indeterminate when
/// the solver cannot decide.
MembershipResult lift_membership(const LiftedRepresentation& rep, const Eigen::VectorXd& x,
                                 double tol = kDefaultMembershipTol, const SdpOptions& opts = {});

}  // namespace lmirep
