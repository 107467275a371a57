#include "lmirep/polynomial.h"

#include <random>

#include <gtest/gtest.h>

namespace lmirep {
namespace {

Polynomial P(const char* s, int n) { return parse_polynomial(s, n); }

Polynomial random_poly(std::mt19937_64& rng, int n, int deg) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::bernoulli_distribution keep(0.6);
  Polynomial p(n);
  for (const auto& a : monomial_vector(n, deg)) {
    if (keep(rng)) p.add_term(a, coef(rng));
  }
  return p;
}

Eigen::VectorXd random_point(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = u(rng);
  return x;
}

TEST(Polynomial, AddCancels) {
  EXPECT_EQ(P("x1^2 + 1", 2) + P("-1", 2), P("x1^2", 2));
  EXPECT_EQ(P("1 - x1^2 - x2^2", 2) + P("x1^2", 2), P("1 - x2^2", 2));
  Polynomial p = P("3x1x2 - 7", 2);
  EXPECT_EQ(p + Polynomial(2), p);
  EXPECT_TRUE((p - p).is_zero());
  EXPECT_EQ((p - p).degree(), Polynomial::kZeroDegree);
}

TEST(Polynomial, Multiply) {
  EXPECT_EQ(P("x1", 2) * P("x2", 2), P("x1*x2", 2));
  EXPECT_EQ(P("1 - x1", 1) * P("1 + x1", 1), P("1 - x1^2", 1));
  EXPECT_THROW(P("x1", 1) * P("x1", 2), DimensionError);
}

TEST(Polynomial, ProductMatchesEvaluation) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    Polynomial p = random_poly(rng, 3, 3), q = random_poly(rng, 3, 3);
    Polynomial pq = p * q;
    if (!p.is_zero() && !q.is_zero()) EXPECT_EQ(pq.degree(), p.degree() + q.degree());
    for (int k = 0; k < 20; ++k) {
      Eigen::VectorXd x = random_point(rng, 3);
      const double ref = p.eval(x) * q.eval(x);
      EXPECT_NEAR(pq.eval(x), ref, 1e-10 * (1.0 + std::abs(ref)));
    }
  }
}

TEST(Polynomial, RingLaws) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    Polynomial p = random_poly(rng, 3, 2), q = random_poly(rng, 3, 2), r = random_poly(rng, 3, 2);
    Polynomial lhs = (p + q) * r;
    Polynomial rhs = p * r + q * r;
    for (int k = 0; k < 20; ++k) {
      Eigen::VectorXd x = random_point(rng, 3);
      const double scale = 1.0 + std::abs(p.eval(x) * r.eval(x)) + std::abs(q.eval(x) * r.eval(x));
      EXPECT_NEAR(lhs.eval(x), rhs.eval(x), 1e-9 * scale);
    }
  }
}

TEST(Polynomial, Evaluate) {
  Polynomial disk = P("1 - x1^2 - x2^2", 2);
  EXPECT_DOUBLE_EQ(disk.eval(Eigen::Vector2d(0, 0)), 1.0);
  EXPECT_DOUBLE_EQ(disk.eval(Eigen::Vector2d(1, 0)), 0.0);
  EXPECT_DOUBLE_EQ(P("(x1-2)^2 + x2^2 - 1", 2).eval(Eigen::Vector2d(1, 0)), 0.0);
}

TEST(Polynomial, Gradient) {
  auto g = P("1 - x1^2 - x2^2", 2).gradient();
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0], P("-2x1", 2));
  EXPECT_EQ(g[1], P("-2x2", 2));
  for (const auto& c : P("5", 3).gradient()) EXPECT_TRUE(c.is_zero());
}

TEST(Polynomial, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(13);
  Polynomial p = random_poly(rng, 3, 4);
  const double h = 1e-5;
  for (int k = 0; k < 10; ++k) {
    Eigen::VectorXd x = random_point(rng, 3);
    Eigen::VectorXd g = p.eval_gradient(x);
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      const double fd = (p.eval(xp) - p.eval(xm)) / (2 * h);
      EXPECT_LE(std::abs(fd - g(i)), 1e-6 * std::max(1.0, std::abs(g(i))));
    }
  }
}

TEST(Polynomial, Hessian) {
  PolyMatrix h = P("(x1-2)^2 + x2^2 - 1", 2).hessian();
  EXPECT_EQ(h(0, 0), P("2", 2));
  EXPECT_TRUE(h(0, 1).is_zero());
  EXPECT_EQ(h(1, 1), P("2", 2));
  PolyMatrix tv = P("1 - x1^4 - x2^4", 2).hessian();
  EXPECT_EQ(tv(0, 0), P("-12x1^2", 2));
  EXPECT_EQ(tv(1, 1), P("-12x2^2", 2));
  EXPECT_TRUE(tv(1, 0).is_zero());

  std::mt19937_64 rng(14);
  Polynomial p = random_poly(rng, 3, 4);
  PolyMatrix hp = p.hessian();
  EXPECT_TRUE(hp.is_symmetric());
  auto grad = p.gradient();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ(hp(i, j), grad[static_cast<size_t>(i)].derivative(j));
  }
}

TEST(Polynomial, MonomialVector) {
  auto v = monomial_vector(2, 1);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0], ExponentVector({0, 0}));
  EXPECT_EQ(v[1], ExponentVector({1, 0}));
  EXPECT_EQ(v[2], ExponentVector({0, 1}));
  EXPECT_EQ(monomial_vector(2, 2).size(), 6u);
  auto v34 = monomial_vector(3, 4);
  EXPECT_EQ(v34.size(), 35u);
  for (size_t i = 1; i < v34.size(); ++i) EXPECT_LT(v34[i - 1], v34[i]);
  auto v22 = monomial_vector(2, 2);
  EXPECT_EQ(v22[3], ExponentVector({2, 0}));
  EXPECT_EQ(v22[4], ExponentVector({1, 1}));
  EXPECT_EQ(v22[5], ExponentVector({0, 2}));
}

TEST(Polynomial, ParseErrorsCarryOffset) {
  try {
    parse_polynomial("1 - x3^2", 2);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
  EXPECT_THROW(parse_polynomial("1 + * x1", 2), ParseError);
  EXPECT_THROW(parse_polynomial("(x1 + 1", 2), ParseError);
  EXPECT_THROW(parse_polynomial("", 2), ParseError);
}

TEST(Polynomial, ParseRoundTrip) {
  std::mt19937_64 rng(15);
  for (int k = 0; k < 5; ++k) {
    Polynomial p = random_poly(rng, 3, 3);
    if (p.is_zero()) continue;
    EXPECT_EQ(parse_polynomial(p.to_string(), 3), p);
  }
}

TEST(Polynomial, AffineSubstituteMatchesEvaluation) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    const Polynomial p = random_poly(rng, n, 4);
    const Eigen::VectorXd c = random_point(rng, n);
    const double scale = 0.1 + 0.05 * trial;
    const Polynomial q = affine_substitute(p, c, scale);
    EXPECT_LE(q.degree(), p.degree());
    for (int k = 0; k < 5; ++k) {
      const Eigen::VectorXd z = random_point(rng, n);
      const Eigen::VectorXd x = c + scale * z;
      EXPECT_NEAR(q.eval(z), p.eval(x), 1e-9 * (1.0 + std::abs(p.eval(x))));
    }
  }
}

}  // namespace
}  // namespace lmirep
