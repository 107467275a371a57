#pragma once

// Sampled verification that a lifted representation describes the closed
// convex hull of a set: support functions of the lift (by SDP) against a
// brute-force oracle (grid scan plus local refinement), and two-sided
// membership checks away from the boundary.
//
// Support functions use the minimization convention h(l) = min_{x} l^T x.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "lmirep/lift_sdp.h"
#include "lmirep/sampling.h"
#include "lmirep/sdp.h"
#include "lmirep/sets.h"

namespace lmirep {

enum class SupportStatus { Finite, Unbounded, Indeterminate };

const char* to_string(SupportStatus s);

struct SupportValue {
  SupportStatus status = SupportStatus::Indeterminate;
  double value = 0.0;
  SdpStatus sdp = SdpStatus::NumericalTrouble;
  /// False when the solver stalled on the dual side but its last iterate is
  /// primal feasible with relative gap <= 1e-5 and dual residual <= 1e-4; the
  /// value is then the primal objective, an upper bound.
  bool exact = true;
  /// Minimizing x when finite.
  Eigen::VectorXd x;
};

SupportValue support_lift(const LiftedRepresentation& rep, const Eigen::VectorXd& l,
                          const SdpOptions& opts = {});

struct OracleOptions {
  /// Grid nodes per axis (reduced in three or more dimensions to keep the
  /// scan near two million points).
  int resolution = 400;
  int refine_steps = 30;
};

struct OracleValue {
  /// l^T x at a member x, so never below the true support value.
  double value = 0.0;
  /// The true value lies in [value - error_bound, value]; the bound is the
  /// grid term sqrt(n) * cell * ||l|| plus diameter * 2^-refine_steps, before
  /// any credit for refinement.
  double error_bound = 0.0;
  Eigen::VectorXd point;
};

/// Throws std::runtime_error when no grid node is a member, and
/// std::invalid_argument for sets with equality constraints.
OracleValue support_oracle(const UnionSet& s, const Eigen::VectorXd& l, const Box& box,
                           const OracleOptions& opts = {});

struct VerifyOptions {
  int directions = 64;
  uint64_t seed = 1;
  double tol = 1e-3;
  int membership_samples = 100;
  double membership_tol = kDefaultMembershipTol;
  OracleOptions oracle;
  SdpOptions sdp;
};

struct DirectionResult {
  Eigen::VectorXd direction;
  SupportValue lift;
  OracleValue oracle;
  /// lift - oracle when the lift value is finite.
  double gap = 0.0;
  /// "ok", "violation" or "inconclusive".
  std::string status;
};

struct VerifyReport {
  std::vector<DirectionResult> directions;
  double max_abs_gap = 0.0;
  double max_gap = 0.0;
  int membership_tested = 0;
  int set_in_lift_out = 0;
  int lift_in_set_out = 0;
  int membership_indeterminate = 0;
  double tol = 0.0;
  double margin = 0.0;
  uint64_t seed = 0;
  /// PASS, FAIL or INCONCLUSIVE.
  std::string verdict;
};

/// PASS iff every |gap| <= tol and no membership confusion at margin 3 tol;
/// FAIL on any violation; INCONCLUSIVE when a direction is unbounded or the
/// solver could not decide and nothing failed.
VerifyReport compare(const LiftedRepresentation& rep, const UnionSet& s, const Box& box,
                     const VerifyOptions& opts = {});

/// Box containing every block, read off the supports of a moment relaxation
/// along +-e_i and padded by 5% + 1e-3. Tries orders up to two above the
/// minimum, then throws std::runtime_error.
Box bounding_box(const UnionSet& s, const SdpOptions& opts = {});

nlohmann::json to_json(const VerifyReport& r);
std::string to_text(const VerifyReport& r);
/// One row per direction: index, l, lift, oracle, gap, status.
std::string gap_csv(const VerifyReport& r);

}  // namespace lmirep
