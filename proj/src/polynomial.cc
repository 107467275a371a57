#include "lmirep/polynomial.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace lmirep {

ExponentVector::ExponentVector(std::vector<int> exps) : exps_(std::move(exps)) {
  for (int e : exps_) {
    if (e < 0) throw std::invalid_argument("negative exponent");
  }
}

ExponentVector ExponentVector::unit(int n, int i) {
  ExponentVector e(n);
  e.exps_[static_cast<size_t>(i)] = 1;
  return e;
}

int ExponentVector::degree() const { return std::accumulate(exps_.begin(), exps_.end(), 0); }

ExponentVector ExponentVector::operator+(const ExponentVector& other) const {
  if (dim() != other.dim()) throw DimensionError("exponent dimension mismatch");
  ExponentVector out = *this;
  for (size_t i = 0; i < exps_.size(); ++i) out.exps_[i] += other.exps_[i];
  return out;
}

std::strong_ordering ExponentVector::operator<=>(const ExponentVector& other) const {
  const int da = degree();
  const int db = other.degree();
  if (da != db) return da <=> db;
  // Within a degree the larger exponent vector (lexicographically) sorts first.
  return other.exps_ <=> exps_;
}

namespace {

void enumerate_degree(int n, int remaining, int var, std::vector<int>& cur,
                      std::vector<ExponentVector>& out) {
  if (var == n - 1) {
    cur[static_cast<size_t>(var)] = remaining;
    out.emplace_back(cur);
    cur[static_cast<size_t>(var)] = 0;
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[static_cast<size_t>(var)] = e;
    enumerate_degree(n, remaining - e, var + 1, cur, out);
  }
  cur[static_cast<size_t>(var)] = 0;
}

}  // namespace

std::vector<ExponentVector> monomial_vector(int n, int d) {
  if (d < 0) throw std::invalid_argument("monomial_vector: negative degree");
  if (n <= 0) throw std::invalid_argument("monomial_vector: nonpositive dimension");
  std::vector<ExponentVector> out;
  std::vector<int> cur(static_cast<size_t>(n), 0);
  for (int k = 0; k <= d; ++k) enumerate_degree(n, k, 0, cur, out);
  return out;
}

Polynomial Polynomial::constant(int n, double c) {
  Polynomial p(n);
  p.add_term(ExponentVector(n), c);
  return p;
}

Polynomial Polynomial::variable(int n, int i) {
  if (i < 0 || i >= n) throw DimensionError("variable index out of range");
  Polynomial p(n);
  p.add_term(ExponentVector::unit(n, i), 1.0);
  return p;
}

Polynomial Polynomial::monomial(const ExponentVector& alpha, double c) {
  Polynomial p(alpha.dim());
  p.add_term(alpha, c);
  return p;
}

int Polynomial::degree() const {
  if (terms_.empty()) return kZeroDegree;
  // Graded order puts the highest degree last.
  return terms_.rbegin()->first.degree();
}

double Polynomial::coefficient(const ExponentVector& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [a, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

void Polynomial::add_term(const ExponentVector& alpha, double c) {
  if (alpha.dim() != n_) throw DimensionError("term dimension mismatch");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(alpha, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::eval(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw DimensionError("eval: point dimension mismatch");
  if (terms_.empty()) return 0.0;
  const int d = degree();
  // powers[i][k] = x_i^k
  std::vector<std::vector<double>> powers(static_cast<size_t>(n_),
                                          std::vector<double>(static_cast<size_t>(d) + 1, 1.0));
  for (int i = 0; i < n_; ++i) {
    auto& row = powers[static_cast<size_t>(i)];
    for (int k = 1; k <= d; ++k) row[static_cast<size_t>(k)] = row[static_cast<size_t>(k) - 1] * x[static_cast<size_t>(i)];
  }
  double sum = 0.0;
  for (const auto& [alpha, c] : terms_) {
    double term = c;
    for (int i = 0; i < n_; ++i) {
      term *= powers[static_cast<size_t>(i)][static_cast<size_t>(alpha[i])];
    }
    sum += term;
  }
  return sum;
}

Polynomial Polynomial::derivative(int i) const {
  if (i < 0 || i >= n_) throw DimensionError("derivative: variable index out of range");
  Polynomial out(n_);
  for (const auto& [alpha, c] : terms_) {
    const int e = alpha[i];
    if (e == 0) continue;
    std::vector<int> exps = alpha.exponents();
    exps[static_cast<size_t>(i)] -= 1;
    out.add_term(ExponentVector(std::move(exps)), c * e);
  }
  return out;
}

std::vector<Polynomial> Polynomial::gradient() const {
  std::vector<Polynomial> g;
  g.reserve(static_cast<size_t>(n_));
  for (int i = 0; i < n_; ++i) g.push_back(derivative(i));
  return g;
}

PolyMatrix Polynomial::hessian() const {
  PolyMatrix h(n_, n_, n_);
  for (int i = 0; i < n_; ++i) {
    const Polynomial di = derivative(i);
    for (int j = i; j < n_; ++j) {
      Polynomial dij = di.derivative(j);
      h(j, i) = dij;
      h(i, j) = std::move(dij);
    }
  }
  return h;
}

Eigen::VectorXd Polynomial::eval_gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g(n_);
  for (int i = 0; i < n_; ++i) g(i) = derivative(i).eval(x);
  return g;
}

Eigen::MatrixXd Polynomial::eval_hessian(const Eigen::VectorXd& x) const {
  return hessian().eval(x);
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& [a, c] : out.terms_) c = -c;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& q) {
  if (q.n_ != n_) throw DimensionError("add: dimension mismatch");
  for (const auto& [a, c] : q.terms_) add_term(a, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& q) {
  if (q.n_ != n_) throw DimensionError("sub: dimension mismatch");
  for (const auto& [a, c] : q.terms_) add_term(a, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double c) {
  if (c == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [a, v] : terms_) v *= c;
  return *this;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  char buf[64];
  for (const auto& [alpha, c] : terms_) {
    double mag = std::abs(c);
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    first = false;
    const bool is_const = alpha.degree() == 0;
    if (is_const || mag != 1.0) {
      std::snprintf(buf, sizeof(buf), "%.17g", mag);
      out += buf;
      if (!is_const) out += "*";
    }
    bool first_var = true;
    for (int i = 0; i < n_; ++i) {
      if (alpha[i] == 0) continue;
      if (!first_var) out += "*";
      first_var = false;
      out += "x" + std::to_string(i + 1);
      if (alpha[i] > 1) out += "^" + std::to_string(alpha[i]);
    }
  }
  return out;
}

Polynomial operator+(Polynomial p, const Polynomial& q) {
  p += q;
  return p;
}

Polynomial operator-(Polynomial p, const Polynomial& q) {
  p -= q;
  return p;
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  if (p.dim() != q.dim()) throw DimensionError("mul: dimension mismatch");
  Polynomial out(p.dim());
  for (const auto& [a, ca] : p.terms()) {
    for (const auto& [b, cb] : q.terms()) out.add_term(a + b, ca * cb);
  }
  return out;
}

Polynomial operator*(double c, Polynomial p) {
  p *= c;
  return p;
}

Polynomial pow(const Polynomial& p, int k) {
  if (k < 0) throw std::invalid_argument("pow: negative exponent");
  Polynomial out = Polynomial::constant(p.dim(), 1.0);
  for (int i = 0; i < k; ++i) out = out * p;
  return out;
}

Polynomial affine_substitute(const Polynomial& p, const Eigen::VectorXd& shift, double scale) {
  const int n = p.dim();
  if (shift.size() != n) throw DimensionError("affine_substitute: shift dimension mismatch");
  std::vector<std::vector<Polynomial>> powers(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Polynomial v = Polynomial::constant(n, shift(i)) + scale * Polynomial::variable(n, i);
    powers[static_cast<size_t>(i)].push_back(Polynomial::constant(n, 1.0));
    for (int k = 1; k <= p.degree(); ++k) {
      powers[static_cast<size_t>(i)].push_back(powers[static_cast<size_t>(i)].back() * v);
    }
  }
  Polynomial out(n);
  for (const auto& [alpha, c] : p.terms()) {
    Polynomial t = Polynomial::constant(n, c);
    for (int i = 0; i < n; ++i) {
      if (alpha[i] > 0) t = t * powers[static_cast<size_t>(i)][static_cast<size_t>(alpha[i])];
    }
    out += t;
  }
  return out;
}

PolyMatrix::PolyMatrix(int rows, int cols, int n)
    : rows_(rows), cols_(cols),
      entries_(static_cast<size_t>(rows) * static_cast<size_t>(cols), Polynomial(n)) {}

bool PolyMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (int i = 0; i < rows_; ++i) {
    for (int j = i + 1; j < cols_; ++j) {
      if (!((*this)(i, j) == (*this)(j, i))) return false;
    }
  }
  return true;
}

Eigen::MatrixXd PolyMatrix::eval(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd m(rows_, cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).eval(x);
  }
  return m;
}

int PolyMatrix::degree() const {
  int d = Polynomial::kZeroDegree;
  for (const auto& p : entries_) d = std::max(d, p.degree());
  return d;
}

Eigen::VectorXd eval_monomials(std::span<const ExponentVector> basis, const Eigen::VectorXd& x) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(basis.size()));
  for (size_t k = 0; k < basis.size(); ++k) {
    double m = 1.0;
    for (int i = 0; i < basis[k].dim(); ++i) m *= std::pow(x(i), basis[k][i]);
    v(static_cast<Eigen::Index>(k)) = m;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Parser: recursive descent over
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor (['*'] factor)*
//   factor := primary ['^' integer]
//   primary:= number | 'x' integer | '(' expr ')'
// ---------------------------------------------------------------------------
namespace {

class Parser {
 public:
  Parser(std::string_view text, int n) : text_(text), n_(n) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("polynomial parse error: " + msg, pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool starts_primary(char c) const {
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'x' || c == '(';
  }

  Polynomial expr() {
    Polynomial acc(n_);
    bool first = true;
    for (;;) {
      char c = peek();
      double sign = 1.0;
      if (c == '+' || c == '-') {
        sign = c == '-' ? -1.0 : 1.0;
        ++pos_;
      } else if (!first) {
        break;
      }
      Polynomial t = term();
      if (sign < 0) t = -t;
      acc += t;
      first = false;
    }
    return acc;
  }

  Polynomial term() {
    Polynomial acc = factor();
    for (;;) {
      char c = peek();
      if (c == '*') {
        ++pos_;
        acc = acc * factor();
      } else if (starts_primary(c)) {
        acc = acc * factor();
      } else {
        break;
      }
    }
    return acc;
  }

  Polynomial factor() {
    Polynomial base = primary();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      const size_t start = pos_;
      int k = integer();
      if (k > 64) {
        pos_ = start;
        fail("exponent too large");
      }
      base = pow(base, k);
    }
    return base;
  }

  int integer() {
    skip_ws();
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      fail("expected integer");
    }
    long v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > 1'000'000) fail("integer too large");
      ++pos_;
    }
    return static_cast<int>(v);
  }

  Polynomial primary() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (c == 'x') {
      const size_t start = pos_;
      ++pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        fail("expected variable index after 'x'");
      }
      int idx = integer();
      if (idx < 1 || idx > n_) {
        pos_ = start;
        fail("variable x" + std::to_string(idx) + " outside x1..x" + std::to_string(n_));
      }
      return Polynomial::variable(n_, idx - 1);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.data() + pos_;
      // strtod needs a terminated buffer; copy the numeric span.
      size_t end = pos_;
      while (end < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.' ||
              text_[end] == 'e' || text_[end] == 'E' ||
              ((text_[end] == '+' || text_[end] == '-') && end > pos_ &&
               (text_[end - 1] == 'e' || text_[end - 1] == 'E')))) {
        ++end;
      }
      std::string num(begin, end - pos_);
      char* stop = nullptr;
      double v = std::strtod(num.c_str(), &stop);
      if (stop == num.c_str()) fail("malformed number");
      pos_ += static_cast<size_t>(stop - num.c_str());
      return Polynomial::constant(n_, v);
    }
    if (c == '\0') fail("unexpected end of input");
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  int n_;
  size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(std::string_view text, int n) {
  if (n <= 0) throw DimensionError("parse_polynomial: nonpositive dimension");
  return Parser(text, n).parse();
}

}  // namespace lmirep
