// Acceptance checks: one PASS/FAIL line per criterion, tolerances pinned
// below. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "lmirep/certify.h"
#include "lmirep/hull_union.h"
#include "lmirep/lift_sdp.h"
#include "lmirep/localize.h"
#include "lmirep/moment.h"
#include "lmirep/polynomial.h"
#include "lmirep/sdp.h"
#include "lmirep/verify.h"
#include "test_support.h"

using namespace lmirep;

namespace {

constexpr double kDiskGapTol = 1e-5;
constexpr double kDiskSeconds = 2.0;
constexpr double kSosResidualTol = 1e-7;
constexpr double kVerifyTol = 1e-3;
constexpr double kTvSeconds = 30.0;
constexpr double kHullBand = 3e-3;
constexpr double kEigTol = 1e-8;
constexpr double kSdpTol = 1e-7;
constexpr double kFdRelTol = 1e-6;
constexpr double kReconstructionTol = 1e-9;
constexpr double kPointMassTol = 1e-9;
constexpr double kMonotoneTol = 1e-7;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Polynomial P(const char* s, int n = 2) { return parse_polynomial(s, n); }

Outcome disk_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  const LiftedRepresentation rep = build_moment_lmi(BasicSet(2, {P("1 - x1^2 - x2^2")}), 1, MomentMode::Preordering);
  double worst = 0.0;
  int bad = 0;
  for (const auto& l : probe_directions(2, 64, 1)) {
    const SupportValue v = support_lift(rep, l);
    if (v.status != SupportStatus::Finite || !v.exact) {
      ++bad;
      continue;
    }
    worst = std::max(worst, std::abs(v.value + 1.0));
  }
  const double t = seconds_since(t0);
  return {bad == 0 && worst <= kDiskGapTol && t < kDiskSeconds,
          fmt("max |gap| %.2e (<= %.0e) over 64 directions, %d unsolved, %.2f s (< %.0f s)", worst, kDiskGapTol, bad,
              t, kDiskSeconds)};
}

Outcome tv_screen() {
  const auto t0 = std::chrono::steady_clock::now();
  const Polynomial g = P("1 - x1^4 - x2^4");
  const SosConcavityResult sos = check_sos_concave(g);
  const double residual = sos.certificate ? sos.certificate->residual : INFINITY;
  const UnionSet s = UnionSet::single(BasicSet(2, {g}));
  VerifyOptions o;
  o.directions = 64;
  o.tol = kVerifyTol;
  const VerifyReport r = compare(build_moment_lmi(s.blocks[0], 2), s, Box::cube(2, 1.5), o);
  const double t = seconds_since(t0);
  return {sos.status == SosStatus::Certified && residual <= kSosResidualTol && r.verdict == "PASS" && t < kTvSeconds,
          fmt("sos-concave %s, residual %.1e (<= %.0e); N=2 verify %s, max |gap| %.2e (tol %.0e); %.2f s (< %.0f s)",
              sos.status == SosStatus::Certified ? "yes" : "no", residual, kSosResidualTol, r.verdict.c_str(),
              r.max_abs_gap, kVerifyTol, t, kTvSeconds)};
}

Outcome bounded_tightness() {
  std::mt19937_64 rng(2203);
  std::uniform_real_distribution<double> axis(0.15, 0.8), angle(0.0, std::numbers::pi), ctr(-1.0, 1.0);
  int outside_band = 0, inside_band = 0, points = 0, indeterminate = 0;
  for (int pair = 0; pair < 10; ++pair) {
    std::vector<LiftedRepresentation> reps;
    std::vector<Eigen::Vector2d> samples;
    for (int k = 0; k < 2; ++k) {
      const double th = angle(rng);
      Eigen::Matrix2d R;
      R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
      const double a = axis(rng), b = axis(rng);
      const Eigen::Matrix2d Pm = R * Eigen::Vector2d(a * a, b * b).asDiagonal() * R.transpose();
      const Eigen::Vector2d c(ctr(rng), ctr(rng));
      reps.push_back(testing::ellipse_rep(Pm, c));
      for (int j = 0; j < 2048; ++j) {
        samples.push_back(testing::ellipse_point(Pm, c, 2 * std::numbers::pi * j / 2048));
      }
    }
    const auto hull = testing::convex_hull(samples);
    Eigen::Vector2d lo = samples[0], hi = samples[0];
    for (const auto& x : samples) {
      lo = lo.cwiseMin(x);
      hi = hi.cwiseMax(x);
    }
    const Eigen::Vector2d pad = 0.1 * (hi - lo);
    lo -= pad;
    hi += pad;
    const UnionLift ul = build_union(reps);
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) {
        const Eigen::Vector2d x(lo(0) + (hi(0) - lo(0)) * i / 19.0, lo(1) + (hi(1) - lo(1)) * j / 19.0);
        const double depth = testing::polygon_depth(hull, x);
        const Membership m = ul.membership(x).verdict;
        ++points;
        if (m == Membership::Indeterminate) ++indeterminate;
        const bool agree = m != Membership::Indeterminate && (m == Membership::Inside) == (depth >= 0);
        if (agree) continue;
        (std::abs(depth) <= kHullBand ? inside_band : outside_band)++;
      }
    }
  }
  return {outside_band == 0,
          fmt("%d grid points over 10 ellipse pairs: %d disagreements beyond the %.0e band, %d within, %d indeterminate",
              points, outside_band, kHullBand, inside_band, indeterminate)};
}

Outcome unbounded_union() {
  LiftedRepresentation w1(2, 0);
  LinearPencil p(2, 2, 0);
  p.A0 << 0, 1, 1, 0;
  p.Ax[0] << 1, 0, 0, 0;
  p.Ax[1] << 0, 0, 0, 1;
  w1.pencils.push_back(p);
  LiftedRepresentation w2(2, 0);
  for (int i = 0; i < 2; ++i) w2.equalities.push_back({Eigen::Vector2d::Unit(i), 0.0});
  const UnionLift ul = build_union({w1, w2});
  int wrong = 0;
  std::vector<Eigen::Vector2d> in = {Eigen::Vector2d(1, 0)};
  for (double t : {0.1, 1.0, 10.0}) in.push_back(Eigen::Vector2d(t, 1.0 / t));
  for (const auto& x : in) wrong += ul.membership(x).verdict != Membership::Inside;
  wrong += ul.membership(Eigen::Vector2d(-1, -1)).verdict != Membership::Outside;
  const SupportValue v = support_lift(ul.output, Eigen::Vector2d(-1, -1).normalized());
  return {wrong == 0 && v.status == SupportStatus::Unbounded,
          fmt("%d of 5 membership checks wrong; support along (-1,-1)/sqrt2 is %s", wrong, to_string(v.status))};
}

Outcome necessary_condition() {
  const Polynomial g = P("(x1-2)^2 + x2^2 - 1");
  const PointVerdict pv = check_quasi_concave_at(g, Eigen::Vector2d(1, 0));
  const double e = pv.tangent_eigenvalues.size() ? pv.tangent_eigenvalues.minCoeff() : NAN;
  const ClassifyReport r = classify(UnionSet::single(BasicSet(2, {P("1 - x1^2 - x2^2"), g})), Box::cube(2, 1.5));
  const ConstraintReport& c = r.constraints.at(1);
  const bool at_u = c.violation_point && (*c.violation_point - Eigen::Vector2d(1, 0)).norm() <= 1e-6;
  return {!pv.quasi_concave && std::abs(e + 2.0) <= kEigTol && c.verdict == ConstraintVerdict::RedundantSuspect && at_u,
          fmt("quasi-concave %s, min tangent eigenvalue %.10f (-2 +- %.0e); classify: %s%s", pv.quasi_concave ? "yes" : "no",
              e, kEigTol, to_string(c.verdict), at_u ? " at (1,0)" : " (violation point not at (1,0))")};
}

Outcome localization() {
  const UnionSet disk = UnionSet::single(BasicSet(2, {P("1 - x1^2 - x2^2")}));
  const Box box = Box::cube(2, 1.5);
  CoverOptions co;
  co.auto_count = 8;
  const CoverPlan plan = plan_cover(disk, box, co);
  const UnionLift ul = build_cover_representation(plan, 1);
  VerifyOptions vo;
  vo.tol = kVerifyTol;
  const VerifyReport r = compare(ul.output, disk, box, vo);
  Rng rng(606);
  int missing = 0;
  for (int k = 0; k < 200; ++k) {
    const Eigen::VectorXd x = uniform_in_ball(rng, Eigen::Vector2d(0, 0), 1.0);
    missing += ul.membership(x).verdict != Membership::Inside;
  }
  return {plan.patches.size() == 8 && r.verdict == "PASS" && missing == 0,
          fmt("%zu patches, verify %s (max |gap| %.2e, tol %.0e), %d of 200 disk samples outside the glued lift",
              plan.patches.size(), r.verdict.c_str(), r.max_abs_gap, kVerifyTol, missing)};
}

Outcome solver_health() {
  auto run = [](std::vector<int>& iters, double& worst_gap, double& worst_kkt, int& not_optimal) {
    std::mt19937_64 rng(7007);
    for (int trial = 0; trial < 50; ++trial) {
      const SdpProblem p = testing::planted_sdp(rng, 3 + trial % 6, {2 + trial % 3, 3, 1 + trial % 4}, trial % 3);
      const SdpSolution s = solve(p);
      iters.push_back(s.iterations);
      not_optimal += s.status != SdpStatus::Optimal;
      worst_gap = std::max(worst_gap, s.relative_gap);
      worst_kkt = std::max(worst_kkt, s.max_kkt_residual());
    }
  };
  std::vector<int> a, b;
  double gap = 0, kkt = 0, gap2 = 0, kkt2 = 0;
  int bad = 0, bad2 = 0;
  run(a, gap, kkt, bad);
  run(b, gap2, kkt2, bad2);
  return {bad == 0 && gap <= kSdpTol && kkt <= kSdpTol && a == b,
          fmt("50 planted SDPs: %d not optimal, max gap %.1e, max KKT residual %.1e (<= %.0e), iteration counts %s",
              bad, gap, kkt, kSdpTol, a == b ? "repeat exactly" : "differ between runs")};
}

Outcome invariants() {
  std::mt19937_64 rng(8008);
  std::uniform_real_distribution<double> coef(-1.0, 1.0), pt(-1.0, 1.0);
  auto random_poly = [&](int n, int deg) {
    Polynomial p(n);
    for (const auto& a : monomial_vector(n, deg)) {
      if (coef(rng) > -0.3) p.add_term(a, coef(rng));
    }
    return p;
  };
  auto random_point = [&](int n) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = pt(rng);
    return x;
  };
  int ring = 0, fd = 0, recon = 0, mass = 0, mono = 0, mass_tested = 0, mono_tested = 0;
  double worst_fd = 0, worst_recon = 0, worst_mass = INFINITY, worst_mono = INFINITY;
  for (int trial = 0; trial < 24; ++trial) {
    const int n = 1 + trial % 3;
    const int deg = 1 + trial % 4;
    const Polynomial p = random_poly(n, deg), q = random_poly(n, deg), r = random_poly(n, 2);
    auto close = [](const Polynomial& a, const Polynomial& b) { return (a - b).max_abs_coefficient() <= 1e-12; };
    if (!close(p + q, q + p) || !close(p * q, q * p) || !close((p + q) + r, p + (q + r)) ||
        !close((p * q) * r, p * (q * r)) || !close(p * (q + r), p * q + p * r)) {
      ++ring;
    }

    const Eigen::VectorXd x = random_point(n);
    const Eigen::VectorXd grad = p.eval_gradient(x);
    for (int i = 0; i < n; ++i) {
      const double h = 1e-5;
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, i);
      const double num = (p.eval(x + h * e) - p.eval(x - h * e)) / (2 * h);
      const double err = std::abs(num - grad(i)) / std::max(1.0, std::abs(grad(i)));
      worst_fd = std::max(worst_fd, err);
      fd += err > kFdRelTol;
    }

    // Sets with m <= 3 constraints around a ball so that samples exist.
    std::vector<Polynomial> hs = {P("1 - x1^2", n) - (n >= 2 ? P("x2^2", n) : Polynomial(n))};
    for (int j = 1; j < 1 + trial % 3; ++j) hs.push_back(Polynomial::constant(n, 0.6) + 0.2 * random_poly(n, 1 + (trial + j) % 2));
    const BasicSet s(n, hs);
    const int N = minimum_order(s) + trial % 2;
    for (const auto& t : preordering_terms(s, N, MomentMode::Preordering)) {
      const int d = (t.product.degree() + 1) / 2;
      const auto basis = monomial_vector(n, N - d);
      const auto mats = localizing_matrices(t.product, N);
      for (int k = 0; k < 25; ++k) {
        const Eigen::VectorXd y = random_point(n);
        const Eigen::VectorXd v = eval_monomials(basis, y);
        const Eigen::MatrixXd lhs = t.product.eval(y) * v * v.transpose();
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(lhs.rows(), lhs.cols());
        for (const auto& [alpha, a] : mats) rhs += Polynomial::monomial(alpha).eval(y) * a;
        const double err = (lhs - rhs).cwiseAbs().maxCoeff() / (1.0 + lhs.cwiseAbs().maxCoeff());
        worst_recon = std::max(worst_recon, err);
        recon += err > kReconstructionTol;
      }
    }
    const LiftedRepresentation rep = build_moment_lmi(s, N);
    for (int k = 0, tested = 0; k < 2000 && tested < 10; ++k) {
      const Eigen::VectorXd y = random_point(n);
      if (!membership(s, y)) continue;
      ++tested;
      ++mass_tested;
      const double e = rep.min_eigenvalue(y, point_mass_lift(s, y, N));
      worst_mass = std::min(worst_mass, e);
      mass += e < -kPointMassTol;
    }
    const LiftedRepresentation up = build_moment_lmi(s, N + 1);
    for (const auto& l : testing::unit_directions(n, 2, 9000 + trial)) {
      const SdpSolution sol = solve(support_problem(up, l));
      if (sol.status != SdpStatus::Optimal) continue;
      ++mono_tested;
      const Eigen::VectorXd xs = sol.z.head(n);
      const double e = rep.min_eigenvalue(xs, sol.z.segment(n, rep.num_lifted));
      worst_mono = std::min(worst_mono, e);
      mono += e < -kMonotoneTol;
    }
  }
  return {ring + fd + recon + mass + mono == 0 && mass_tested >= 100 && mono_tested >= 24,
          fmt("24 instances: ring %d, gradient %d (max rel err %.1e), reconstruction %d (max %.1e), point mass %d "
              "of %d (min eig %.1e), monotonicity %d of %d (min eig %.1e) failures",
              ring, fd, worst_fd, recon, worst_recon, mass, mass_tested, worst_mass, mono, mono_tested, worst_mono)};
}

Outcome pdlh_calibration() {
  const PdlhReport disk = pdlh_probe(BasicSet(2, {P("1 - x1^2 - x2^2")}), Eigen::Vector2d(1, 0), 0.3, 16, 1);
  const PdlhReport rev = pdlh_probe(BasicSet(2, {P("(x1-2)^2 + x2^2 - 1")}), Eigen::Vector2d(1, 0), 0.3, 16, 1);
  return {disk.verdict == "PROBE-PASS" && rev.verdict == "PROBE-FAIL" && disk.directions.size() == 16 &&
              rev.directions.size() == 16,
          fmt("disk %s, reversed circle %s, 16 directions each", disk.verdict.c_str(), rev.verdict.c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 disk exactness", disk_exactness},
      {"2 TV screen", tv_screen},
      {"3 bounded tightness of the union hull", bounded_tightness},
      {"4 unbounded union semantics", unbounded_union},
      {"5 necessary-condition detector", necessary_condition},
      {"6 localization pipeline", localization},
      {"7 solver health", solver_health},
      {"8 invariant suites", invariants},
      {"9 PDLH probe calibration", pdlh_calibration},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
