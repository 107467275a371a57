#pragma once

// Local patches S cap B(u, delta) around boundary points, each represented by
// a moment relaxation of the active constraints plus the ball, glued by
// hull_union. In hull mode the centers are minimizers of linear functionals
// over T, i.e. points of the convex boundary.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lmirep/certify.h"
#include "lmirep/hull_union.h"
#include "lmirep/moment.h"
#include "lmirep/sampling.h"
#include "lmirep/sets.h"

namespace lmirep {

/// One basic set of the union restricted to a ball.
struct PatchPiece {
  int block = 0;
  /// Constraint indices of the block kept in `set`, active ones first.
  std::vector<int> kept;
  std::vector<int> active;
  BasicSet set;
};

struct CoverPatch {
  Eigen::VectorXd center;
  double delta = 0.0;
  std::vector<PatchPiece> pieces;
};

enum class CoverMode { Convex, Hull };

const char* to_string(CoverMode m);

struct CoverPlan {
  int n = 0;
  CoverMode mode = CoverMode::Convex;
  std::vector<CoverPatch> patches;
  /// "auto" or "manual".
  std::string provenance;
  uint64_t seed = 0;
};

struct CoverOptions {
  CoverMode mode = CoverMode::Convex;
  /// Manual centers; when empty, `auto_count` centers are chosen.
  std::vector<Eigen::VectorXd> centers;
  int auto_count = 8;
  /// Fixed radius; when unset the radius policy below applies per center.
  std::optional<double> delta;
  double delta_floor = 1e-3;
  int max_halvings = 20;
  /// Samples per ball when checking that dropped constraints stay positive.
  int check_samples = 400;
  /// Also require strict quasi-concavity of the active constraints at sampled
  /// zero-set points inside each ball.
  bool require_strict_qc = false;
  int candidates_per_center = 8;
  /// Constraints with |h| <= active_tol * max(1, max|coef|) at the center are active.
  double active_tol = 1e-6;
  uint64_t seed = 1;
  /// Auto mode: after the first auto_count centers, keep adding the
  /// candidate farthest outside 0.9 delta of every patch until all are
  /// covered; CoverError past max_patches.
  bool complete = false;
  int max_patches = 64;
  CertifyOptions certify;
};

/// Thrown when no radius above the floor separates the dropped constraints.
class CoverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// min over inactive constraints of blocks containing u of |h(u)| / ||grad h(u)||
/// and over blocks not containing u of the same ratio for their violated
/// constraints; +inf when nothing constrains it.
double local_feature_scale(const UnionSet& s, const Eigen::VectorXd& u);

/// Distinct minimizers of `count` seeded linear functionals over the union
/// (grid-seeded multistart per block), deduplicated within 1e-6.
std::vector<Eigen::VectorXd> convex_boundary_candidates(const UnionSet& s, const Box& box, int count,
                                                        uint64_t seed);

/// Greedy farthest-point subset of size min(k, points.size()), starting with
/// points[0].
std::vector<Eigen::VectorXd> farthest_points(const std::vector<Eigen::VectorXd>& points, int k);

/// Auto radius: delta0 = 0.5 * min(feature scale, half the smallest box side),
/// floored at delta_floor, halved until the dropped constraints stay positive
/// on the sampled ball (and strict quasi-concavity holds when required).
/// With a fixed radius, constraints that cannot be shown positive on the ball
/// are kept in the piece instead. Noncompact inputs are not supported: the
/// box must contain the set.
CoverPlan plan_cover(const UnionSet& s, const Box& box, const CoverOptions& opts = {});

/// Moment relaxation of `piece` built in the frame z = (x - center) / delta,
/// with each constraint normalized to unit max coefficient, and mapped back
/// through the equalities x = center + delta z. Same projection as a direct
/// build, with moments of order one instead of |center|^2N.
LiftedRepresentation local_patch_lift(const BasicSet& piece, const Eigen::VectorXd& center, double delta, int N,
                                      MomentMode mode = MomentMode::Preordering);

/// local_patch_lift for every piece, glued by build_union.
UnionLift build_cover_representation(const CoverPlan& plan, int N,
                                     MomentMode mode = MomentMode::Preordering,
                                     const UnionOptions& union_opts = {});

nlohmann::json to_json(const CoverPlan& plan);

}  // namespace lmirep
