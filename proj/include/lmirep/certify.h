#pragma once

// Hypothesis checks for lifted LMI representability: sos-concavity of the
// defining polynomials, (strict) quasi-concavity at boundary points, a
// sampled redundancy probe and a sampled probe of the positive definite
// Lagrange Hessian condition. Everything except the sos-concavity
// certificate is sampled evidence, not proof.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "lmirep/local_opt.h"
#include "lmirep/polynomial.h"
#include "lmirep/sampling.h"
#include "lmirep/sdp.h"
#include "lmirep/sets.h"

namespace lmirep {

struct CertifyOptions {
  double eig_tol = 1e-6;
  double grad_tol = 1e-7;
  SdpOptions sdp;
};

// ---------------------------------------------------------------------------
// sos-concavity

/// Q over the products w_i x^alpha listed in `index`, with
/// w^T (-hess g(x)) w = sum_{p,q} Q_pq w_{i_p} w_{i_q} x^{alpha_p + alpha_q}.
struct SosConcavityCertificate {
  int n = 0;
  std::vector<std::pair<int, ExponentVector>> index;
  Eigen::MatrixXd Q;
  /// Largest coefficient mismatch of the identity, absolute.
  double residual = 0.0;
  /// max(1, largest coefficient of -hess g).
  double scale = 1.0;
  double min_eigenvalue = 0.0;
  /// Rows of W(x) = L^T [w (x) v(x)] from Q = L L^T.
  int rank = 0;

  /// (w (x) v(x))^T Q (w (x) v(x)).
  double form(const Eigen::VectorXd& w, const Eigen::VectorXd& x) const;
};

enum class SosStatus { Certified, NotSos, Indeterminate };

const char* to_string(SosStatus s);

struct SosConcavityResult {
  SosStatus status = SosStatus::Indeterminate;
  std::optional<SosConcavityCertificate> certificate;
  /// Phase-I value of the Gram problem (<= feas_tol when certified).
  double margin = 0.0;
};

SosConcavityResult check_sos_concave(const Polynomial& g, const CertifyOptions& opts = {});

// ---------------------------------------------------------------------------
// quasi-concavity at a point

struct PointVerdict {
  Eigen::VectorXd point;
  int constraint = -1;
  double gradient_norm = 0.0;
  /// Ascending spectrum of -B^T hess g(u) B for an orthonormal basis B of
  /// grad g(u)^perp, or of -hess g(u) when the gradient vanishes.
  Eigen::VectorXd tangent_eigenvalues;
  bool nonsingular = true;
  bool quasi_concave = false;
  bool strictly_quasi_concave = false;
};

/// The thresholds are eig_tol * ||grad g(u)|| on the tangent form and
/// eig_tol * max|coef g| on the singular branch, so the flags do not change
/// when g is multiplied by a positive constant. The point is singular when
/// ||grad g(u)|| <= grad_tol * max|coef g|.
PointVerdict check_quasi_concave_at(const Polynomial& g, const Eigen::VectorXd& u,
                                    const CertifyOptions& opts = {});

/// I - grad grad^T / ||grad||^2; identity when the gradient is zero.
Eigen::MatrixXd tangent_projector(const Eigen::VectorXd& grad);

// ---------------------------------------------------------------------------
// boundary sampling

struct BoundaryPoint {
  Eigen::VectorXd point;
  std::vector<int> active;
};

struct BoundarySampleOptions {
  /// Points where |h_i| <= active_tol * max(1, max|coef h_i|) count as active.
  double active_tol = 1e-8;
  int interior_draws = 20000;
  int steps_per_ray = 256;
  std::optional<Eigen::VectorXd> interior_hint;
};

/// Rays from seeded interior points; along each ray the last sign change of
/// min_i h_i is bisected. Throws std::invalid_argument for sets with
/// equalities and std::runtime_error when no interior point is found.
std::vector<BoundaryPoint> sample_boundary(const BasicSet& s, const Box& box, int count,
                                           uint64_t seed, const BoundarySampleOptions& opts = {});

// ---------------------------------------------------------------------------
// redundancy

struct RedundancyProbe {
  bool redundant_suspect = false;
  int samples = 0;
  /// Samples in B(u, radius) satisfying every other constraint of the block.
  int others_satisfied = 0;
  /// Of those, samples where constraint j is violated.
  int cut_by_constraint = 0;
  double radius = 0.0;
};

/// Constraint j is suspected redundant at u when no sample of B(u, radius)
/// that satisfies the other constraints violates h_j.
RedundancyProbe probe_redundancy(const BasicSet& s, int j, const Eigen::VectorXd& u, double radius,
                                 int samples, uint64_t seed);

// ---------------------------------------------------------------------------
// positive definite Lagrange Hessian probe

struct PdlhOptions {
  double eig_tol = 1e-6;
  /// First-order condition accepted when the fitted KKT residual is below this.
  double kkt_tol = 1e-6;
  /// Probe +-e_i before the seeded directions.
  bool include_axes = true;
  int grid_per_axis = 5;
  int extra_starts = 4;
  LocalOptions local;
};

enum class ProbeStatus { Pass, Fail, Indeterminate };

const char* to_string(ProbeStatus s);

struct PdlhDirection {
  Eigen::VectorXd direction;
  Eigen::VectorXd minimizer;
  double value = 0.0;
  double kkt_residual = 0.0;
  Eigen::VectorXd ineq_multipliers;
  Eigen::VectorXd eq_multipliers;
  /// Smallest eigenvalue of the Lagrangian Hessian over the ball grid.
  double min_hessian_eigenvalue = 0.0;
  ProbeStatus status = ProbeStatus::Indeterminate;
};

struct PdlhReport {
  Eigen::VectorXd center;
  double delta = 0.0;
  uint64_t seed = 0;
  int grid_points = 0;
  std::vector<PdlhDirection> directions;
  /// PROBE-PASS, PROBE-FAIL or PROBE-INDETERMINATE.
  std::string verdict;
};

/// Minimizes l^T x over s intersected with B(u, delta) for each sampled l and
/// checks that the Lagrangian Hessian, with the multipliers fitted at the
/// minimizer, is positive definite on a grid of the ball. The ball
/// constraint is the last inequality of the probed problem.
PdlhReport pdlh_probe(const BasicSet& s, const Eigen::VectorXd& u, double delta, int directions,
                      uint64_t seed, const PdlhOptions& opts = {});

// ---------------------------------------------------------------------------
// classification

enum class ConstraintVerdict {
  SosConcave,
  StrictQcOnSamples,
  NecessaryViolated,
  RedundantSuspect,
  NotActive,
  Inconclusive,
};

const char* to_string(ConstraintVerdict v);

struct ConstraintReport {
  int block = 0;
  int constraint = 0;
  std::string polynomial;
  SosStatus sos = SosStatus::Indeterminate;
  std::optional<SosConcavityCertificate> certificate;
  std::vector<PointVerdict> points;
  int singular_points = 0;
  /// Point of the first quasi-concavity failure, with the redundancy probe.
  std::optional<Eigen::VectorXd> violation_point;
  std::optional<RedundancyProbe> redundancy;
  ConstraintVerdict verdict = ConstraintVerdict::Inconclusive;
};

struct ClassifyOptions {
  int samples_per_block = 64;
  uint64_t seed = 1;
  /// Extra boundary points to test (each is matched to the blocks it lies on).
  std::vector<Eigen::VectorXd> extra_points;
  double redundancy_radius = 0.05;
  int redundancy_samples = 4000;
  CertifyOptions certify;
  BoundarySampleOptions boundary;
};

struct ClassifyReport {
  std::vector<ConstraintReport> constraints;
  /// SUFFICIENT-PASS, NECESSARY-VIOLATED or INCONCLUSIVE.
  std::string verdict;
  /// sos-concave when every active constraint is certified, strict-qc when
  /// the sampled strict quasi-concavity route is open, none otherwise.
  std::string route;
  uint64_t seed = 0;
  Box box;
  CertifyOptions tolerances;
};

ClassifyReport classify(const UnionSet& s, const Box& box, const ClassifyOptions& opts = {});

nlohmann::json to_json(const SosConcavityCertificate& c);
nlohmann::json to_json(const PointVerdict& v);
nlohmann::json to_json(const PdlhReport& r);
nlohmann::json to_json(const ClassifyReport& r);
std::string to_text(const ClassifyReport& r);
std::string to_text(const PdlhReport& r);

}  // namespace lmirep
