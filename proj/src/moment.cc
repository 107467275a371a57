#include "lmirep/moment.h"

#include <algorithm>
#include <string>

namespace lmirep {

MomentBasis::MomentBasis(int dim, int order) : n(dim), N(order) {
  if (n <= 0) throw DimensionError("MomentBasis: nonpositive dimension");
  if (N < 0) throw std::invalid_argument("MomentBasis: negative order");
  monomials = monomial_vector(n, 2 * N);
  for (size_t i = 0; i < monomials.size(); ++i) index.emplace(monomials[i], static_cast<int>(i));
}

int MomentBasis::position(const ExponentVector& alpha) const {
  auto it = index.find(alpha);
  if (it == index.end()) throw std::out_of_range("MomentBasis: monomial beyond order 2N");
  return it->second;
}

const char* to_string(MomentMode m) {
  return m == MomentMode::Preordering ? "preordering" : "module";
}

MomentMode moment_mode_from_string(const std::string& s) {
  if (s == "preordering") return MomentMode::Preordering;
  if (s == "module") return MomentMode::Module;
  throw std::invalid_argument("unknown moment mode '" + s + "'");
}

namespace {

int half_degree(const Polynomial& p) { return (std::max(p.degree(), 0) + 1) / 2; }

}  // namespace

std::vector<PreorderingTerm> preordering_terms(const BasicSet& s, int N, MomentMode mode) {
  const int m = static_cast<int>(s.inequalities.size());
  std::vector<PreorderingTerm> out;
  const auto consider = [&](std::vector<int> nu) {
    int deg = 0;
    for (int j = 0; j < m; ++j) {
      if (nu[static_cast<size_t>(j)]) deg += std::max(s.inequalities[static_cast<size_t>(j)].degree(), 0);
    }
    const int d = (deg + 1) / 2;
    if (d > N) return;
    Polynomial prod = Polynomial::constant(s.n, 1.0);
    for (int j = 0; j < m; ++j) {
      if (nu[static_cast<size_t>(j)]) prod = prod * s.inequalities[static_cast<size_t>(j)];
    }
    out.push_back({std::move(nu), std::move(prod), d});
  };
  if (mode == MomentMode::Module) {
    consider(std::vector<int>(static_cast<size_t>(m), 0));
    for (int j = 0; j < m; ++j) {
      std::vector<int> nu(static_cast<size_t>(m), 0);
      nu[static_cast<size_t>(j)] = 1;
      consider(std::move(nu));
    }
    return out;
  }
  const unsigned long long total = 1ULL << m;
  for (unsigned long long w = 0; w < total; ++w) {
    std::vector<int> nu(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) nu[static_cast<size_t>(j)] = (w >> (m - 1 - j)) & 1ULL ? 1 : 0;
    consider(std::move(nu));
  }
  return out;
}

LocalizingMatrices localizing_matrices(const Polynomial& h, int N) {
  const int d = half_degree(h);
  if (d > N) {
    throw OrderTooSmall("localizing matrix needs order >= " + std::to_string(d) + ", got " +
                        std::to_string(N));
  }
  const auto basis = monomial_vector(h.dim(), N - d);
  const Eigen::Index s = static_cast<Eigen::Index>(basis.size());
  LocalizingMatrices out;
  for (const auto& [beta, c] : h.terms()) {
    for (Eigen::Index i = 0; i < s; ++i) {
      for (Eigen::Index j = i; j < s; ++j) {
        const ExponentVector alpha = beta + basis[static_cast<size_t>(i)] + basis[static_cast<size_t>(j)];
        auto [it, fresh] = out.try_emplace(alpha, Eigen::MatrixXd::Zero(s, s));
        it->second(i, j) += c;
        if (i != j) it->second(j, i) += c;
      }
    }
  }
  return out;
}

int minimum_order(const BasicSet& s) {
  int N = 1;
  for (const auto& h : s.inequalities) N = std::max(N, half_degree(h));
  for (const auto& f : s.equalities) N = std::max(N, half_degree(f));
  return N;
}

LiftedRepresentation build_moment_lmi(const BasicSet& s, int N, MomentMode mode,
                                      int preordering_cap) {
  s.validate();
  const int need = minimum_order(s);
  if (N < need) {
    throw OrderTooSmall("relaxation order " + std::to_string(N) + " below minimum " +
                        std::to_string(need));
  }
  const int m = static_cast<int>(s.inequalities.size());
  if (mode == MomentMode::Preordering && m > preordering_cap) {
    throw std::invalid_argument("preordering mode refused for " + std::to_string(m) +
                                " inequalities (cap " + std::to_string(preordering_cap) +
                                "); use module mode");
  }
  const int n = s.n;
  const MomentBasis basis(n, N);
  LiftedRepresentation rep(n, basis.num_lifted());

  // Column of y_alpha in (x, u): -1 for the constant y_0.
  const auto place = [&](LinearPencil& p, const ExponentVector& alpha, const Eigen::MatrixXd& a) {
    const int pos = basis.position(alpha);
    if (pos == 0) {
      p.A0 += a;
    } else if (pos <= n) {
      p.Ax[static_cast<size_t>(pos - 1)] += a;
    } else {
      p.Bu[static_cast<size_t>(pos - n - 1)] += a;
    }
  };

  nlohmann::json nus = nlohmann::json::array();
  for (const auto& term : preordering_terms(s, N, mode)) {
    const LocalizingMatrices mats = localizing_matrices(term.product, N);
    const int size = static_cast<int>(mats.begin()->second.rows());
    LinearPencil p(size, n, basis.num_lifted());
    for (const auto& [alpha, a] : mats) place(p, alpha, a);
    rep.pencils.push_back(std::move(p));
    nus.push_back(term.nu);
  }
  for (const auto& f : s.equalities) {
    AffineEquality e;
    e.coeffs = Eigen::VectorXd::Zero(n + basis.num_lifted());
    for (const auto& [alpha, c] : f.terms()) {
      const int pos = basis.position(alpha);
      if (pos == 0) {
        e.constant += c;
      } else {
        e.coeffs(pos - 1) += c;
      }
    }
    rep.equalities.push_back(std::move(e));
  }
  rep.metadata["construction"] = "moment";
  rep.metadata["order"] = N;
  rep.metadata["mode"] = to_string(mode);
  rep.metadata["nu"] = std::move(nus);
  return rep;
}

Eigen::VectorXd point_mass_lift(const BasicSet& s, const Eigen::VectorXd& x, int N) {
  if (x.size() != s.n) throw DimensionError("point_mass_lift: dimension mismatch");
  if (!membership(s, x)) throw std::invalid_argument("point_mass_lift: point is not in the set");
  const auto mons = monomial_vector(s.n, 2 * N);
  const Eigen::VectorXd all = eval_monomials(mons, x);
  return all.tail(all.size() - s.n - 1);
}

}  // namespace lmirep
