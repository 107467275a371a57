#include "lmirep/local_opt.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lmirep {
namespace {

struct Compiled {
  const NlpProblem* p;
  std::vector<Polynomial> fgrad;
  std::vector<std::vector<Polynomial>> hgrad;
  std::vector<std::vector<Polynomial>> cgrad;
  std::vector<double> hscale;
  std::vector<double> cscale;

  explicit Compiled(const NlpProblem& prob) : p(&prob), fgrad(prob.objective.gradient()) {
    for (const auto& h : prob.inequalities) {
      hgrad.push_back(h.gradient());
      hscale.push_back(std::max(1.0, h.max_abs_coefficient()));
    }
    for (const auto& c : prob.equalities) {
      cgrad.push_back(c.gradient());
      cscale.push_back(std::max(1.0, c.max_abs_coefficient()));
    }
  }

  static Eigen::VectorXd grad(const std::vector<Polynomial>& g, const Eigen::VectorXd& x) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
    for (size_t i = 0; i < g.size(); ++i) v(static_cast<Eigen::Index>(i)) = g[i].eval(x);
    return v;
  }

  double violation(const Eigen::VectorXd& x) const {
    double v = 0.0;
    for (size_t i = 0; i < p->inequalities.size(); ++i) {
      v = std::max(v, -p->inequalities[i].eval(x) / hscale[i]);
    }
    for (size_t k = 0; k < p->equalities.size(); ++k) {
      v = std::max(v, std::abs(p->equalities[k].eval(x)) / cscale[k]);
    }
    return v;
  }
};

struct AugLag {
  const Compiled& c;
  const Eigen::VectorXd& lam;
  const Eigen::VectorXd& mu;
  double rho;

  double value(const Eigen::VectorXd& x, Eigen::VectorXd* g) const {
    const NlpProblem& p = *c.p;
    double v = p.objective.eval(x);
    if (g) *g = Compiled::grad(c.fgrad, x);
    for (size_t i = 0; i < p.inequalities.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double h = p.inequalities[i].eval(x);
      const double s = std::max(0.0, lam(ii) - rho * h);
      v += (s * s - lam(ii) * lam(ii)) / (2.0 * rho);
      if (g && s > 0) *g -= s * Compiled::grad(c.hgrad[i], x);
    }
    for (size_t k = 0; k < p.equalities.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const double e = p.equalities[k].eval(x);
      v += -mu(kk) * e + 0.5 * rho * e * e;
      if (g) *g += (rho * e - mu(kk)) * Compiled::grad(c.cgrad[k], x);
    }
    return v;
  }
};

// BFGS on the augmented Lagrangian; returns the final gradient norm.
double bfgs(const AugLag& f, Eigen::VectorXd& x, double gtol, int max_iter, int* iters) {
  const auto n = x.size();
  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g;
  double fx = f.value(x, &g);
  for (int it = 0; it < max_iter; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= gtol) return g.lpNorm<Eigen::Infinity>();
    Eigen::VectorXd d = -Hinv * g;
    if (d.dot(g) >= 0) {
      Hinv.setIdentity();
      d = -g;
    }
    double step = 1.0;
    const double slope = d.dot(g);
    Eigen::VectorXd xn, gn;
    double fn = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + step * d;
      fn = f.value(xn, &gn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++*iters;
    if (!accepted) break;
    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      if (it == 0) Hinv *= sy / y.squaredNorm();
      const double r = 1.0 / sy;
      const Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n) - r * s * y.transpose();
      Hinv = V * Hinv * V.transpose() + r * s * s.transpose();
    }
    const bool tiny = s.lpNorm<Eigen::Infinity>() <= 1e-16 * (1.0 + x.lpNorm<Eigen::Infinity>());
    x = xn;
    g = gn;
    fx = fn;
    if (tiny) break;
  }
  return g.lpNorm<Eigen::Infinity>();
}

Eigen::MatrixXd jacobian(const std::vector<std::vector<Polynomial>>& grads,
                         const std::vector<int>& rows, const Eigen::VectorXd& x) {
  Eigen::MatrixXd J(static_cast<Eigen::Index>(rows.size()), x.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    J.row(static_cast<Eigen::Index>(r)) =
        Compiled::grad(grads[static_cast<size_t>(rows[r])], x).transpose();
  }
  return J;
}

std::vector<int> active_set(const Compiled& c, const Eigen::VectorXd& x, double tol) {
  std::vector<int> a;
  for (size_t i = 0; i < c.p->inequalities.size(); ++i) {
    if (c.p->inequalities[i].eval(x) <= tol * c.hscale[i]) a.push_back(static_cast<int>(i));
  }
  return a;
}

std::vector<int> all_rows(size_t m) {
  std::vector<int> r(m);
  for (size_t i = 0; i < m; ++i) r[i] = static_cast<int>(i);
  return r;
}

KktFit fit(const Compiled& c, const Eigen::VectorXd& x, double active_tol) {
  const NlpProblem& p = *c.p;
  KktFit out;
  out.active = active_set(c, x, active_tol);
  out.ineq = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.inequalities.size()));
  out.eq = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.equalities.size()));
  const Eigen::VectorXd gf = Compiled::grad(c.fgrad, x);
  const auto na = static_cast<Eigen::Index>(out.active.size());
  const auto ne = out.eq.size();
  if (na + ne == 0) {
    out.residual = gf.norm() / (1.0 + gf.norm());
    return out;
  }
  Eigen::MatrixXd A(x.size(), na + ne);
  if (na > 0) A.leftCols(na) = jacobian(c.hgrad, out.active, x).transpose();
  if (ne > 0) A.rightCols(ne) = jacobian(c.cgrad, all_rows(p.equalities.size()), x).transpose();
  std::vector<bool> nonneg(static_cast<size_t>(na + ne), false);
  std::fill(nonneg.begin(), nonneg.begin() + na, true);
  const Eigen::VectorXd y = bounded_least_squares(A, gf, nonneg);
  for (Eigen::Index k = 0; k < na; ++k) out.ineq(out.active[static_cast<size_t>(k)]) = y(k);
  out.eq = y.tail(ne);
  out.residual = (gf - A * y).norm() / (1.0 + gf.norm());
  return out;
}

// Newton steps on the KKT system of the active set; keeps the result only if
// it stays feasible with nonnegative multipliers and a smaller residual.
void polish(const Compiled& c, LocalResult& r, const LocalOptions& opts) {
  const NlpProblem& p = *c.p;
  const std::vector<int> act = active_set(c, r.x, std::max(opts.active_tol, 1e-6));
  const auto na = static_cast<Eigen::Index>(act.size());
  const auto ne = static_cast<Eigen::Index>(p.equalities.size());
  const auto n = r.x.size();
  Eigen::VectorXd x = r.x;
  Eigen::VectorXd lam(na);
  for (Eigen::Index k = 0; k < na; ++k) lam(k) = r.ineq_multipliers(act[static_cast<size_t>(k)]);
  Eigen::VectorXd mu = r.eq_multipliers;
  const auto eq_rows = all_rows(p.equalities.size());

  auto residual = [&](const Eigen::VectorXd& xx, const Eigen::VectorXd& l, const Eigen::VectorXd& m) {
    Eigen::VectorXd F(n + na + ne);
    Eigen::VectorXd g = Compiled::grad(c.fgrad, xx);
    if (na > 0) g -= jacobian(c.hgrad, act, xx).transpose() * l;
    if (ne > 0) g -= jacobian(c.cgrad, eq_rows, xx).transpose() * m;
    F.head(n) = g;
    for (Eigen::Index k = 0; k < na; ++k) F(n + k) = p.inequalities[static_cast<size_t>(act[static_cast<size_t>(k)])].eval(xx);
    for (Eigen::Index k = 0; k < ne; ++k) F(n + na + k) = p.equalities[static_cast<size_t>(k)].eval(xx);
    return F;
  };

  Eigen::VectorXd F = residual(x, lam, mu);
  const double start = F.norm();
  for (int it = 0; it < 10 && F.norm() > 1e-15; ++it) {
    Eigen::VectorXd full_l = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.inequalities.size()));
    for (Eigen::Index k = 0; k < na; ++k) full_l(act[static_cast<size_t>(k)]) = lam(k);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + na + ne, n + na + ne);
    K.topLeftCorner(n, n) = lagrangian_hessian(p, x, full_l, mu);
    if (na > 0) {
      const Eigen::MatrixXd JA = jacobian(c.hgrad, act, x);
      K.block(0, n, n, na) = -JA.transpose();
      K.block(n, 0, na, n) = JA;
    }
    if (ne > 0) {
      const Eigen::MatrixXd JE = jacobian(c.cgrad, eq_rows, x);
      K.block(0, n + na, n, ne) = -JE.transpose();
      K.block(n + na, 0, ne, n) = JE;
    }
    const Eigen::VectorXd step = K.completeOrthogonalDecomposition().solve(-F);
    const Eigen::VectorXd xn = x + step.head(n);
    const Eigen::VectorXd ln = lam + step.segment(n, na);
    const Eigen::VectorXd mn = mu + step.tail(ne);
    const Eigen::VectorXd Fn = residual(xn, ln, mn);
    if (!(Fn.norm() < F.norm())) break;
    x = xn;
    lam = ln;
    mu = mn;
    F = Fn;
  }
  if (!(F.norm() < start)) return;
  if (c.violation(x) > std::max(r.max_violation, opts.feas_tol)) return;
  if (na > 0 && lam.minCoeff() < -1e-8) return;
  if (p.objective.eval(x) > r.value + 1e-9 * (1.0 + std::abs(r.value))) return;
  r.x = x;
  r.value = p.objective.eval(x);
  r.max_violation = c.violation(x);
}

}  // namespace

Eigen::VectorXd bounded_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                      const std::vector<bool>& nonneg) {
  const auto m = A.cols();
  if (static_cast<Eigen::Index>(nonneg.size()) != m) {
    throw std::invalid_argument("bounded_least_squares: mask size mismatch");
  }
  std::vector<bool> passive(static_cast<size_t>(m), false);
  for (Eigen::Index j = 0; j < m; ++j) passive[static_cast<size_t>(j)] = !nonneg[static_cast<size_t>(j)];
  auto solve_passive = [&]() {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (passive[static_cast<size_t>(j)]) cols.push_back(j);
    }
    Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
    if (cols.empty()) return z;
    Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(cols.size()));
    for (size_t k = 0; k < cols.size(); ++k) Ap.col(static_cast<Eigen::Index>(k)) = A.col(cols[k]);
    const Eigen::VectorXd zp = Ap.completeOrthogonalDecomposition().solve(b);
    for (size_t k = 0; k < cols.size(); ++k) z(cols[k]) = zp(static_cast<Eigen::Index>(k));
    return z;
  };
  Eigen::VectorXd x = solve_passive();
  const double tol = 1e-12 * (1.0 + A.norm() * b.norm());
  for (int outer = 0; outer < 3 * static_cast<int>(m) + 3; ++outer) {
    const Eigen::VectorXd w = A.transpose() * (b - A * x);
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!passive[static_cast<size_t>(j)] && w(j) > tol && (best < 0 || w(j) > w(best))) best = j;
    }
    if (best < 0) break;
    passive[static_cast<size_t>(best)] = true;
    for (int inner = 0; inner < 3 * static_cast<int>(m) + 3; ++inner) {
      const Eigen::VectorXd z = solve_passive();
      double alpha = 1.0;
      bool clipped = false;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (passive[static_cast<size_t>(j)] && nonneg[static_cast<size_t>(j)] && z(j) <= 0) {
          const double denom = x(j) - z(j);
          const double a = denom > 0 ? x(j) / denom : 0.0;
          if (a < alpha) alpha = a;
          clipped = true;
        }
      }
      if (!clipped) {
        x = z;
        break;
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < m; ++j) {
        if (passive[static_cast<size_t>(j)] && nonneg[static_cast<size_t>(j)] && x(j) <= 1e-15) {
          passive[static_cast<size_t>(j)] = false;
          x(j) = 0.0;
        }
      }
    }
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    if (nonneg[static_cast<size_t>(j)]) x(j) = std::max(0.0, x(j));
  }
  return x;
}

Eigen::MatrixXd lagrangian_hessian(const NlpProblem& p, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& ineq_mult,
                                   const Eigen::VectorXd& eq_mult) {
  Eigen::MatrixXd H = p.objective.eval_hessian(x);
  for (size_t i = 0; i < p.inequalities.size(); ++i) {
    const double l = ineq_mult(static_cast<Eigen::Index>(i));
    if (l != 0.0) H -= l * p.inequalities[i].eval_hessian(x);
  }
  for (size_t k = 0; k < p.equalities.size(); ++k) {
    const double m = eq_mult(static_cast<Eigen::Index>(k));
    if (m != 0.0) H -= m * p.equalities[k].eval_hessian(x);
  }
  return H;
}

KktFit fit_multipliers(const NlpProblem& p, const Eigen::VectorXd& x, double active_tol) {
  return fit(Compiled(p), x, active_tol);
}

LocalResult minimize_local(const NlpProblem& p, const Eigen::VectorXd& x0, const LocalOptions& opts) {
  if (x0.size() != p.n) throw std::invalid_argument("minimize_local: start has wrong dimension");
  const Compiled c(p);
  const auto mi = static_cast<Eigen::Index>(p.inequalities.size());
  const auto me = static_cast<Eigen::Index>(p.equalities.size());
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(mi);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(me);
  double rho = opts.rho0;
  Eigen::VectorXd x = x0;
  LocalResult r;
  double prev_v = std::numeric_limits<double>::infinity();
  double gnorm = 0.0;
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    const double gtol = std::max(opts.tol, 1e-3 * std::pow(0.1, outer));
    gnorm = bfgs(AugLag{c, lam, mu, rho}, x, gtol, opts.max_inner, &r.iterations);
    double v = 0.0;
    for (Eigen::Index i = 0; i < mi; ++i) {
      const double h = p.inequalities[static_cast<size_t>(i)].eval(x);
      v = std::max(v, std::abs(std::min(h, lam(i) / rho)) / c.hscale[static_cast<size_t>(i)]);
      lam(i) = std::max(0.0, lam(i) - rho * h);
    }
    for (Eigen::Index k = 0; k < me; ++k) {
      const double e = p.equalities[static_cast<size_t>(k)].eval(x);
      v = std::max(v, std::abs(e) / c.cscale[static_cast<size_t>(k)]);
      mu(k) -= rho * e;
    }
    if (v <= opts.feas_tol && gnorm <= opts.tol * 10) break;
    if (v > 0.25 * prev_v) rho = std::min(rho * 10.0, 1e10);
    prev_v = v;
  }
  r.x = x;
  r.value = p.objective.eval(x);
  r.max_violation = c.violation(x);
  r.ineq_multipliers = lam;
  r.eq_multipliers = mu;
  if (opts.polish) polish(c, r, opts);
  const KktFit k = fit(c, r.x, opts.active_tol);
  r.ineq_multipliers = k.ineq;
  r.eq_multipliers = k.eq;
  r.active = k.active;
  r.kkt_residual = k.residual;
  r.converged = r.max_violation <= std::max(opts.feas_tol, 1e-8) && r.kkt_residual <= 1e-6;
  return r;
}

LocalResult minimize_multistart(const NlpProblem& p, const std::vector<Eigen::VectorXd>& starts,
                                const LocalOptions& opts) {
  if (starts.empty()) throw std::invalid_argument("minimize_multistart: no starting points");
  LocalResult best;
  bool have = false;
  for (const auto& s : starts) {
    LocalResult r = minimize_local(p, s, opts);
    if (!have) {
      best = std::move(r);
      have = true;
      continue;
    }
    if (r.converged && (!best.converged || r.value < best.value)) {
      best = std::move(r);
    } else if (!r.converged && !best.converged && r.max_violation < best.max_violation) {
      best = std::move(r);
    }
  }
  return best;
}

}  // namespace lmirep
