#pragma once

// Sparse multivariate polynomials over the reals with exact coefficient
// calculus. Monomials are ordered graded-lexicographically everywhere in the
// library: total degree first, then x1 before x2 before ... within a degree,
// so the degree-<=1 part of any basis reads [1, x1, ..., xn].

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace lmirep {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Multi-index alpha of the monomial x^alpha.
class ExponentVector {
 public:
  ExponentVector() = default;
  explicit ExponentVector(int n) : exps_(static_cast<size_t>(n), 0) {}
  explicit ExponentVector(std::vector<int> exps);

  /// The unit exponent e_i in dimension n.
  static ExponentVector unit(int n, int i);

  int dim() const { return static_cast<int>(exps_.size()); }
  int degree() const;
  int operator[](int i) const { return exps_[static_cast<size_t>(i)]; }
  const std::vector<int>& exponents() const { return exps_; }

  ExponentVector operator+(const ExponentVector& other) const;

  bool operator==(const ExponentVector& other) const = default;
  /// Graded lex: lower total degree first; ties broken so that larger
  /// leading exponents come first (x1^2 < x1*x2 < x2^2).
  std::strong_ordering operator<=>(const ExponentVector& other) const;

 private:
  std::vector<int> exps_;
};

/// All exponent vectors of total degree <= d in graded lex order; the
/// result has C(n+d, d) entries and starts with the constant monomial.
std::vector<ExponentVector> monomial_vector(int n, int d);

class PolyMatrix;

class Polynomial {
 public:
  using TermMap = std::map<ExponentVector, double>;

  /// Sentinel returned by degree() for the zero polynomial.
  static constexpr int kZeroDegree = -1;

  Polynomial() = default;
  explicit Polynomial(int n) : n_(n) {}

  static Polynomial constant(int n, double c);
  static Polynomial variable(int n, int i);
  static Polynomial monomial(const ExponentVector& alpha, double c = 1.0);

  int dim() const { return n_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  double coefficient(const ExponentVector& alpha) const;
  /// Largest absolute coefficient; 0 for the zero polynomial.
  double max_abs_coefficient() const;

  /// Adds c to the coefficient of x^alpha, pruning exact zeros.
  void add_term(const ExponentVector& alpha, double c);

  double eval(std::span<const double> x) const;
  double eval(const Eigen::VectorXd& x) const {
    return eval(std::span<const double>(x.data(), static_cast<size_t>(x.size())));
  }

  Polynomial derivative(int i) const;
  std::vector<Polynomial> gradient() const;
  PolyMatrix hessian() const;

  Eigen::VectorXd eval_gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd eval_hessian(const Eigen::VectorXd& x) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& q);
  Polynomial& operator-=(const Polynomial& q);
  Polynomial& operator*=(double c);

  std::string to_string() const;

  bool operator==(const Polynomial& other) const = default;

 private:
  int n_ = 0;
  TermMap terms_;
};

Polynomial operator+(Polynomial p, const Polynomial& q);
Polynomial operator-(Polynomial p, const Polynomial& q);
Polynomial operator*(const Polynomial& p, const Polynomial& q);
Polynomial operator*(double c, Polynomial p);
Polynomial pow(const Polynomial& p, int k);
/// z -> p(shift + scale * z).
Polynomial affine_substitute(const Polynomial& p, const Eigen::VectorXd& shift, double scale);

/// Free-function spellings used by the rest of the library.
inline Polynomial add(const Polynomial& p, const Polynomial& q) { return p + q; }
inline Polynomial mul(const Polynomial& p, const Polynomial& q) { return p * q; }

/// Dense grid of polynomials; hessian() produces symmetric instances.
class PolyMatrix {
 public:
  PolyMatrix(int rows, int cols, int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Polynomial& operator()(int i, int j) const { return entries_[index(i, j)]; }
  Polynomial& operator()(int i, int j) { return entries_[index(i, j)]; }

  bool is_symmetric() const;
  Eigen::MatrixXd eval(const Eigen::VectorXd& x) const;
  int degree() const;

 private:
  size_t index(int i, int j) const {
    return static_cast<size_t>(i) * static_cast<size_t>(cols_) + static_cast<size_t>(j);
  }
  int rows_;
  int cols_;
  std::vector<Polynomial> entries_;
};

/// Evaluates every monomial of `basis` at x.
Eigen::VectorXd eval_monomials(std::span<const ExponentVector> basis, const Eigen::VectorXd& x);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, size_t offset)
      : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

/// Parses text such as "1 - x1^2 - 3*x2^4" or "(x1-2)^2 + x2^2 - 1" in n
/// variables x1..xn. Juxtaposition multiplies ("2x1x2"). Throws ParseError
/// with the byte offset of the first offending character.
Polynomial parse_polynomial(std::string_view text, int n);

}  // namespace lmirep
