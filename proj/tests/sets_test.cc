#include "lmirep/set_io.h"
#include "lmirep/sets.h"

#include <filesystem>
#include <random>

#include <gtest/gtest.h>

namespace lmirep {
namespace {

double min_eig(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
}

TEST(BallPencil, UnitBall) {
  LinearPencil p = ball_pencil(BallConstraint(Eigen::Vector2d(0, 0), 1.0));
  EXPECT_EQ(p.size, 3);
  Eigen::VectorXd none(0);
  EXPECT_GE(min_eig(p.value(Eigen::Vector2d(0, 0), none)), 0.0);
  EXPECT_LT(min_eig(p.value(Eigen::Vector2d(2, 0), none)), 0.0);
}

TEST(BallPencil, OffsetCenter) {
  LinearPencil p = ball_pencil(BallConstraint(Eigen::Vector2d(1, 0), 0.5));
  Eigen::VectorXd none(0);
  EXPECT_GE(min_eig(p.value(Eigen::Vector2d(1, 0.49), none)), 0.0);
  EXPECT_LT(min_eig(p.value(Eigen::Vector2d(1, 0.51), none)), 0.0);
  EXPECT_THROW(BallConstraint(Eigen::Vector2d(0, 0), 0.0), std::invalid_argument);
}

TEST(BallPencil, SphereIsSingular) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::Vector3d u(0.3, -1.0, 2.0);
  const double delta = 0.7;
  LinearPencil p = ball_pencil(BallConstraint(u, delta));
  for (int k = 0; k < 10; ++k) {
    Eigen::Vector3d d(g(rng), g(rng), g(rng));
    Eigen::VectorXd x = u + delta * d.normalized();
    EXPECT_NEAR(min_eig(p.value(x, Eigen::VectorXd(0))), 0.0, 1e-9);
  }
}

TEST(BallPencil, SignMatchesDistanceOnGrid) {
  Eigen::Vector2d u(0.5, -0.25);
  const double delta = 0.8;
  LinearPencil p = ball_pencil(BallConstraint(u, delta));
  for (int i = 0; i <= 40; ++i) {
    for (int j = 0; j <= 40; ++j) {
      Eigen::Vector2d x(u(0) - 1 + i * 0.05, u(1) - 1 + j * 0.05);
      const double r = (x - u).norm();
      if (std::abs(r - delta) < 1e-6) continue;
      EXPECT_EQ(min_eig(p.value(x, Eigen::VectorXd(0))) >= -1e-12, r <= delta);
    }
  }
}

TEST(BasicSetOps, IntersectBall) {
  BasicSet disk(2, {parse_polynomial("1 - x1^2 - x2^2", 2)});
  BallConstraint b(Eigen::Vector2d(0, 0), 1.0);
  EXPECT_EQ(intersect_ball(disk, b).inequalities.size(), 2u);
  BasicSet eq_only(2, {}, {parse_polynomial("x1 - x2", 2)});
  BasicSet r = intersect_ball(eq_only, BallConstraint(Eigen::Vector2d(1, 2), 0.5));
  ASSERT_EQ(r.inequalities.size(), 1u);
  EXPECT_DOUBLE_EQ(r.inequalities[0].eval(Eigen::Vector2d(1, 2)), 0.25);
  EXPECT_THROW(intersect_ball(disk, BallConstraint(Eigen::Vector3d(0, 0, 0), 1.0)), DimensionError);
}

TEST(BasicSetOps, ActiveConstraints) {
  BasicSet disk(2, {parse_polynomial("1 - x1^2 - x2^2", 2)});
  EXPECT_EQ(active_constraints(disk, Eigen::Vector2d(1, 0), 1e-8), std::vector<int>{0});
  EXPECT_TRUE(active_constraints(disk, Eigen::Vector2d(0, 0), 1e-8).empty());
  BasicSet quad(2, {parse_polynomial("x1", 2), parse_polynomial("x2", 2)});
  EXPECT_EQ(active_constraints(quad, Eigen::Vector2d(0, 0), 1e-8), (std::vector<int>{0, 1}));
}

TEST(BasicSetOps, MembershipMatchesEvaluation) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  BasicSet s(2, {parse_polynomial("1 - x1^2 - x2^2", 2), parse_polynomial("x1 + 0.5", 2)});
  for (int k = 0; k < 200; ++k) {
    Eigen::Vector2d x(u(rng), u(rng));
    bool direct = true;
    for (const auto& h : s.inequalities) direct = direct && h.eval(x) >= -1e-7;
    EXPECT_EQ(membership(s, x, 1e-7), direct);
  }
  EXPECT_THROW(BasicSet(2, {}), std::invalid_argument);
}

TEST(PlainLmi, FeasibilityAgreesWithEigencheck) {
  LiftedRepresentation rep(2, 0);
  rep.pencils.push_back(ball_pencil(BallConstraint(Eigen::Vector2d(0, 0), 1.0)));
  rep.validate();
  EXPECT_GE(rep.min_eigenvalue(Eigen::Vector2d(0.5, 0.5), Eigen::VectorXd(0)), 0.0);
  EXPECT_LT(rep.min_eigenvalue(Eigen::Vector2d(0.8, 0.8), Eigen::VectorXd(0)), 0.0);
}

TEST(SetFile, ParseSingleBlock) {
  UnionSet s = parse_set("# disk\nvars 2\nineq 1 - x1^2 - x2^2\n");
  EXPECT_EQ(s.n, 2);
  ASSERT_EQ(s.blocks.size(), 1u);
  EXPECT_EQ(s.blocks[0].inequalities.size(), 1u);
}

TEST(SetFile, ParseUnion) {
  UnionSet s = parse_set(
      "vars 2\n"
      "set left:\n  ineq 1 - (x1+2)^2 - x2^2\n"
      "set right:\n  ineq 1 - (x1-2)^2 - x2^2\n  eq x2\n");
  ASSERT_EQ(s.blocks.size(), 2u);
  EXPECT_EQ(s.blocks[0].name, "left");
  EXPECT_EQ(s.blocks[1].equalities.size(), 1u);
  UnionSet again = parse_set(format_set(s));
  ASSERT_EQ(again.blocks.size(), 2u);
  EXPECT_EQ(again.blocks[1].inequalities[0], s.blocks[1].inequalities[0]);
}

TEST(SetFile, ErrorsReportPosition) {
  try {
    parse_set("vars 2\nineq 1 - x1^2 - x7\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 17);
  }
  EXPECT_THROW(parse_set("ineq x1\n"), FormatError);
  EXPECT_THROW(parse_set("vars 2\nbogus x1\n"), FormatError);
  EXPECT_THROW(parse_set("vars 2\n"), FormatError);
}

TEST(RepFile, RoundTripThreeBlocks) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  LiftedRepresentation rep(2, 3);
  for (int sz : {1, 3, 4}) {
    LinearPencil p(sz, 2, 3);
    auto fill = [&](Eigen::MatrixXd& m) {
      Eigen::MatrixXd a(sz, sz);
      for (int i = 0; i < sz; ++i)
        for (int j = 0; j < sz; ++j) a(i, j) = g(rng);
      m = a + a.transpose();
    };
    fill(p.A0);
    for (auto& m : p.Ax) fill(m);
    for (auto& m : p.Bu) fill(m);
    rep.pencils.push_back(p);
  }
  AffineEquality e;
  e.coeffs = Eigen::VectorXd::Random(5);
  e.constant = 0.1 + 1.0 / 3.0;
  rep.equalities.push_back(e);
  rep.metadata["note"] = "round trip";

  auto path = std::filesystem::temp_directory_path() / "lmirep_roundtrip.json";
  write_rep(rep, path);
  LiftedRepresentation back = read_rep(path);
  std::filesystem::remove(path);
  ASSERT_EQ(back.pencils.size(), 3u);
  for (size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(back.pencils[k].size, rep.pencils[k].size);
    EXPECT_EQ(back.pencils[k].A0, rep.pencils[k].A0);
    for (size_t j = 0; j < 3; ++j) EXPECT_EQ(back.pencils[k].Bu[j], rep.pencils[k].Bu[j]);
  }
  EXPECT_EQ(back.equalities[0].coeffs, e.coeffs);
  EXPECT_EQ(back.equalities[0].constant, e.constant);
  EXPECT_EQ(back.metadata["note"], "round trip");
}

TEST(RepFile, RejectsMalformed) {
  EXPECT_THROW(rep_from_json(nlohmann::json{{"format", "other"}}), FormatError);
  nlohmann::json j = rep_to_json(LiftedRepresentation(2, 0));
  j["pencils"] = nlohmann::json::array({{{"size", 2}, {"A0", {1, 2}}, {"Ax", {}}, {"Bu", {}}}});
  EXPECT_THROW(rep_from_json(j), FormatError);
  EXPECT_THROW(read_rep("/nonexistent/rep.json"), FileError);
}

}  // namespace
}  // namespace lmirep
