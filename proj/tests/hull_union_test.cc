#include "lmirep/hull_union.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_support.h"

namespace lmirep {
namespace {

using testing::disk_rep;
using testing::ellipse_rep;

double support(const LiftedRepresentation& rep, const Eigen::VectorXd& l, SdpStatus* st = nullptr) {
  SdpSolution s = solve(support_problem(rep, l));
  if (st) *st = s.status;
  return s.primal_objective;
}

// W1 = {[[x1, 1], [1, x2]] >= 0}, W2 = {0}.
std::vector<LiftedRepresentation> hyperbola_and_origin() {
  LiftedRepresentation w1(2, 0);
  LinearPencil p(2, 2, 0);
  p.A0 << 0, 1, 1, 0;
  p.Ax[0] << 1, 0, 0, 0;
  p.Ax[1] << 0, 0, 0, 1;
  w1.pencils.push_back(p);
  LiftedRepresentation w2(2, 0);
  for (int i = 0; i < 2; ++i) {
    AffineEquality e;
    e.coeffs = Eigen::Vector2d::Unit(i);
    w2.equalities.push_back(e);
  }
  return {w1, w2};
}

TEST(HullUnion, Layout) {
  LiftedRepresentation a = disk_rep(Eigen::Vector2d(0, 0), 1);
  LiftedRepresentation b(2, 3);
  b.pencils.push_back(LinearPencil(2, 2, 3));
  b.pencils[0].A0.setIdentity();
  UnionLift ul = build_union({a, b});
  EXPECT_EQ(ul.output.num_lifted, (2 + 0) + (2 + 3) + 2);
  EXPECT_EQ(ul.branch_x_offset(1), 2);
  EXPECT_EQ(ul.branch_u_offset(1), 4);
  EXPECT_EQ(ul.lambda_offset(), 7);
  // Branch pencils, simplex pencil; sum(lambda) = 1 plus n identification rows.
  EXPECT_EQ(ul.output.pencils.size(), 3u);
  EXPECT_EQ(ul.output.equalities.size(), 3u);
  EXPECT_TRUE(ul.output.pencils[0].A0.isZero());
}

TEST(HullUnion, Errors) {
  EXPECT_THROW(build_union({}), std::invalid_argument);
  LiftedRepresentation a = disk_rep(Eigen::Vector2d(0, 0), 1);
  LiftedRepresentation b(3, 0);
  EXPECT_THROW(build_union({a, b}), DimensionError);
}

TEST(HullUnion, IdempotentOnDisk) {
  LiftedRepresentation d = disk_rep(Eigen::Vector2d(0, 0), 1);
  UnionLift ul = build_union({d, d});
  for (const auto& l : testing::unit_directions(2, 32, 1)) {
    SdpStatus st;
    EXPECT_NEAR(support(ul.output, l, &st), -1.0, 1e-6);
    EXPECT_EQ(st, SdpStatus::Optimal);
  }
}

TEST(HullUnion, TwoDisks) {
  UnionLift ul = build_union({disk_rep(Eigen::Vector2d(-2, 0), 1), disk_rep(Eigen::Vector2d(2, 0), 1)});
  EXPECT_NEAR(support(ul.output, Eigen::Vector2d(0, 1)), -1.0, 1e-6);
  EXPECT_NEAR(support(ul.output, Eigen::Vector2d(1, 0)), -3.0, 1e-6);
  EXPECT_EQ(ul.membership(Eigen::Vector2d(0, 0)).verdict, Membership::Inside);
  EXPECT_EQ(ul.membership(Eigen::Vector2d(0, 0.99)).verdict, Membership::Inside);
  EXPECT_EQ(ul.membership(Eigen::Vector2d(0, 1.05)).verdict, Membership::Outside);
}

TEST(HullUnion, SingleBranchReducesToInput) {
  Eigen::Matrix2d P;
  P << 2.0, 0.3, 0.3, 0.5;
  LiftedRepresentation e = ellipse_rep(P, Eigen::Vector2d(0.4, -0.2));
  UnionLift ul = build_union({e});
  for (const auto& l : testing::unit_directions(2, 16, 2)) {
    EXPECT_NEAR(support(ul.output, l), support(e, l), 1e-8);
  }
}

TEST(HullUnion, UnboundedBranchSemantics) {
  UnionLift ul = build_union(hyperbola_and_origin());
  EXPECT_EQ(ul.membership(Eigen::Vector2d(1, 1)).verdict, Membership::Inside);
  EXPECT_EQ(ul.membership(Eigen::Vector2d(1, 0)).verdict, Membership::Inside);
  for (double t : {0.1, 1.0, 10.0}) {
    EXPECT_EQ(ul.membership(Eigen::Vector2d(t, 1.0 / t)).verdict, Membership::Inside) << t;
  }
  EXPECT_EQ(ul.membership(Eigen::Vector2d(-1, -1)).verdict, Membership::Outside);
  SdpStatus st;
  support(ul.output, Eigen::Vector2d(-1, -1).normalized(), &st);
  EXPECT_EQ(st, SdpStatus::Unbounded);
  SdpStatus st2;
  EXPECT_NEAR(support(ul.output, Eigen::Vector2d(1, 1).normalized(), &st2), 0.0, 1e-6);
  EXPECT_EQ(st2, SdpStatus::Optimal);
}

TEST(HullUnion, BoundednessProbeFlagsInput) {
  UnionOptions o;
  o.probe_boundedness = true;
  UnionLift ul = build_union(hyperbola_and_origin(), o);
  EXPECT_EQ(ul.output.metadata["possibly_unbounded_inputs"], nlohmann::json::array({0}));
  UnionLift ok = build_union({disk_rep(Eigen::Vector2d(0, 0), 1)}, o);
  EXPECT_TRUE(ok.output.metadata["possibly_unbounded_inputs"].empty());
}

TEST(HullUnion, InclusionOfConvexCombinations) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  Eigen::Matrix2d P1, P2, P3;
  P1 << 1.0, 0.2, 0.2, 0.3;
  P2 << 0.2, 0.0, 0.0, 0.8;
  P3 << 0.5, -0.1, -0.1, 0.5;
  std::vector<LiftedRepresentation> reps = {ellipse_rep(P1, Eigen::Vector2d(-1.5, 0)),
                                            ellipse_rep(P2, Eigen::Vector2d(1.0, 1.0)),
                                            ellipse_rep(P3, Eigen::Vector2d(0.5, -1.5))};
  UnionLift ul = build_union(reps);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    double total = 0.0;
    std::vector<double> lam(3);
    for (auto& v : lam) total += (v = w(rng));
    for (size_t k = 0; k < 3; ++k) {
      const auto dirs = testing::unit_directions(2, 1, 1000 + trial * 3 + k);
      SdpSolution s = solve(support_problem(reps[k], dirs[0]));
      ASSERT_EQ(s.status, SdpStatus::Optimal);
      x += lam[k] / total * s.z.head(2);
    }
    EXPECT_EQ(ul.membership(x).verdict, Membership::Inside);
  }
}

TEST(HullUnion, SegmentBetweenTwoPoints) {
  auto point = [](double a, double b) {
    LiftedRepresentation r(2, 0);
    for (int i = 0; i < 2; ++i) {
      AffineEquality e;
      e.coeffs = Eigen::Vector2d::Unit(i);
      e.constant = -(i == 0 ? a : b);
      r.equalities.push_back(e);
    }
    return r;
  };
  UnionLift ul = build_union({point(0, 0), point(1, 0)});
  EXPECT_EQ(ul.membership(Eigen::Vector2d(0.3, 0)).verdict, Membership::Inside);
  EXPECT_EQ(ul.membership(Eigen::Vector2d(0.3, 0.01)).verdict, Membership::Outside);
  EXPECT_NEAR(support(ul.output, Eigen::Vector2d(-1, 0)), -1.0, 1e-7);
}

}  // namespace
}  // namespace lmirep
