#include "lmirep/sdp.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace lmirep {

void SdpBlock::add_term(int var, const Eigen::MatrixXd& m) {
  if (m.rows() != size || m.cols() != size) throw std::invalid_argument("SdpBlock: term size");
  for (auto& [v, mat] : terms) {
    if (v == var) {
      mat += m;
      return;
    }
  }
  terms.emplace_back(var, m);
}

Eigen::MatrixXd SdpBlock::value(const Eigen::VectorXd& z) const {
  Eigen::MatrixXd out = constant;
  for (const auto& [v, m] : terms) out += z(v) * m;
  return out;
}

SdpProblem::SdpProblem(int nv)
    : num_vars(nv), objective(Eigen::VectorXd::Zero(nv)), eq_matrix(0, nv), eq_rhs(0) {}

void SdpProblem::add_equality(const Eigen::VectorXd& row, double rhs) {
  if (row.size() != num_vars) throw std::invalid_argument("SdpProblem: equality row length");
  eq_matrix.conservativeResize(eq_matrix.rows() + 1, num_vars);
  eq_matrix.row(eq_matrix.rows() - 1) = row.transpose();
  eq_rhs.conservativeResize(eq_rhs.size() + 1);
  eq_rhs(eq_rhs.size() - 1) = rhs;
}

void SdpProblem::validate() const {
  if (num_vars < 0) throw std::invalid_argument("SdpProblem: negative variable count");
  if (objective.size() != num_vars) throw std::invalid_argument("SdpProblem: objective length");
  if (eq_matrix.cols() != num_vars || eq_matrix.rows() != eq_rhs.size()) {
    throw std::invalid_argument("SdpProblem: equality shape");
  }
  if (blocks.empty() && eq_matrix.rows() == 0) {
    throw std::invalid_argument("SdpProblem: no blocks and no equalities");
  }
  for (const auto& b : blocks) {
    if (b.size <= 0) throw std::invalid_argument("SdpProblem: empty block");
    if (b.constant.rows() != b.size || b.constant.cols() != b.size) {
      throw std::invalid_argument("SdpProblem: block constant size");
    }
    for (const auto& [v, m] : b.terms) {
      if (v < 0 || v >= num_vars) throw std::invalid_argument("SdpProblem: term variable index");
      if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("SdpProblem: nonsymmetric coefficient");
      }
    }
  }
}

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::Infeasible: return "Infeasible";
    case SdpStatus::Unbounded: return "Unbounded";
    case SdpStatus::NumericalTrouble: return "NumericalTrouble";
  }
  return "?";
}

double SdpSolution::max_kkt_residual() const {
  return std::max({primal_residual, equality_residual, dual_residual});
}

double min_block_eigenvalue(const SdpProblem& p, const Eigen::VectorXd& z) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : p.blocks) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.value(z), Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues().minCoeff());
  }
  return m;
}

namespace {

double frob_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.cwiseProduct(b).sum();
}

Eigen::MatrixXd sym(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Largest step a in (0, inf] with M + a dM >= 0 given the Cholesky factor of M.
double max_step(const Eigen::LLT<Eigen::MatrixXd>& chol, const Eigen::MatrixXd& dM) {
  const Eigen::MatrixXd& L = chol.matrixL();
  Eigen::MatrixXd t = L.triangularView<Eigen::Lower>().solve(dM);
  t = L.triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym(t), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

struct Scaling {
  Eigen::MatrixXd G;     // W = G G^T
  Eigen::MatrixXd Ginv;
  Eigen::MatrixXd W;
  Eigen::VectorXd d;     // scaled point V = diag(d)
};

bool nt_scaling(const Eigen::MatrixXd& X, const Eigen::MatrixXd& S, Scaling& out) {
  Eigen::LLT<Eigen::MatrixXd> lx(X), ls(S);
  if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) return false;
  const Eigen::MatrixXd L = lx.matrixL();
  const Eigen::MatrixXd R = ls.matrixL();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R.transpose() * L, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.d = svd.singularValues();
  if (out.d.minCoeff() <= 0.0) return false;
  const Eigen::VectorXd dinvsqrt = out.d.cwiseSqrt().cwiseInverse();
  out.G = L * svd.matrixV() * dinvsqrt.asDiagonal();
  // G^{-1} = D^{1/2} V^T L^{-1}
  Eigen::MatrixXd Linv = L.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(L.rows(), L.cols()));
  out.Ginv = out.d.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() * Linv;
  out.W = out.G * out.G.transpose();
  return true;
}

// Equality preprocessing: drop dependent rows via column-pivoted QR of A^T.
struct ReducedEqualities {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  bool consistent = true;
  double inconsistency = 0.0;
};

ReducedEqualities reduce_equalities(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  ReducedEqualities out;
  if (A.rows() == 0) {
    out.A = A;
    out.b = b;
    return out;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A.transpose());
  qr.setThreshold(1e-11);
  const Eigen::Index r = qr.rank();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < r; ++k) keep.push_back(qr.colsPermutation().indices()(k));
  std::sort(keep.begin(), keep.end());
  out.A.resize(static_cast<Eigen::Index>(keep.size()), A.cols());
  out.b.resize(static_cast<Eigen::Index>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k) {
    out.A.row(static_cast<Eigen::Index>(k)) = A.row(keep[k]);
    out.b(static_cast<Eigen::Index>(k)) = b(keep[k]);
  }
  if (keep.size() < static_cast<size_t>(A.rows())) {
    // Dropped rows must be implied by the kept ones.
    Eigen::VectorXd z = out.A.completeOrthogonalDecomposition().solve(out.b);
    const double res = (A * z - b).cwiseAbs().maxCoeff();
    out.inconsistency = res;
    out.consistent = res <= 1e-9 * (1.0 + b.cwiseAbs().maxCoeff());
  }
  return out;
}

struct IpmResult {
  bool converged = false;
  bool early_stop = false;
  Eigen::VectorXd z;
  std::vector<Eigen::MatrixXd> X;
  Eigen::VectorXd w;
  double pobj = 0.0, dobj = 0.0, gap = 0.0;
  double pres = 0.0, eres = 0.0, dres = 0.0;
  int iterations = 0;
};

using EarlyStop = std::function<bool(const Eigen::VectorXd&)>;

IpmResult run_ipm(const SdpProblem& p, const SdpOptions& opts, const EarlyStop& early = {}) {
  const int m = p.num_vars;
  const Eigen::Index neq = p.eq_matrix.rows();
  const size_t nb = p.blocks.size();
  const Eigen::MatrixXd& A = p.eq_matrix;
  const Eigen::VectorXd& b = p.eq_rhs;
  const Eigen::VectorXd& c = p.objective;

  IpmResult res;
  int total_dim = 0;
  double f0_norm = 0.0;
  for (const auto& blk : p.blocks) {
    total_dim += blk.size;
    f0_norm = std::max(f0_norm, blk.constant.norm());
  }
  const double b_norm = b.size() ? b.norm() : 0.0;
  const double c_norm = c.size() ? c.norm() : 0.0;

  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
  if (neq > 0) z = A.completeOrthogonalDecomposition().solve(b);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(neq);
  std::vector<Eigen::MatrixXd> X(nb), S(nb);
  for (size_t k = 0; k < nb; ++k) {
    const auto& blk = p.blocks[k];
    const double s = blk.size;
    double xi = std::max(10.0, std::sqrt(s));
    double eta = std::max({10.0, std::sqrt(s), blk.constant.norm()});
    for (const auto& [v, mat] : blk.terms) {
      const double fn = mat.norm();
      xi = std::max(xi, s * (1.0 + std::abs(c(v))) / (1.0 + fn));
      eta = std::max(eta, fn);
    }
    X[k] = xi * Eigen::MatrixXd::Identity(blk.size, blk.size);
    S[k] = eta * Eigen::MatrixXd::Identity(blk.size, blk.size);
  }
  if (total_dim == 0) {
    // Pure equality system: any solution is optimal only when c lies in range(A^T).
    res.z = z;
    res.w = neq ? Eigen::VectorXd(A.transpose().completeOrthogonalDecomposition().solve(c)) : Eigen::VectorXd();
    const double dres = neq ? (c - A.transpose() * res.w).norm() : c.norm();
    res.pobj = c.dot(z);
    res.dobj = neq ? b.dot(res.w) : 0.0;
    res.eres = neq ? (A * z - b).norm() / (1.0 + b_norm) : 0.0;
    res.dres = dres / (1.0 + c_norm);
    res.converged = res.eres <= opts.feas_tol && res.dres <= opts.feas_tol;
    return res;
  }
  const double z_scale = 1.0 + z.cwiseAbs().maxCoeff();

  int stall = 0;
  std::vector<Scaling> sc(nb);
  std::vector<Eigen::MatrixXd> RS(nb);
  for (int iter = 0; iter <= opts.max_iterations; ++iter) {
    res.iterations = iter;
    // Residuals.
    Eigen::VectorXd rd = c;
    double pres2 = 0.0, xs = 0.0, f0x = 0.0;
    for (size_t k = 0; k < nb; ++k) {
      const auto& blk = p.blocks[k];
      RS[k] = blk.value(z) - S[k];
      pres2 += RS[k].squaredNorm();
      xs += frob_inner(X[k], S[k]);
      f0x += frob_inner(blk.constant, X[k]);
      for (const auto& [v, mat] : blk.terms) rd(v) -= frob_inner(mat, X[k]);
    }
    Eigen::VectorXd re;
    if (neq > 0) {
      rd -= A.transpose() * w;
      re = b - A * z;
    } else {
      re = Eigen::VectorXd::Zero(0);
    }
    const double mu = xs / total_dim;
    const double pobj = c.dot(z);
    const double dobj = -f0x + (neq ? b.dot(w) : 0.0);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double comp = xs / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double pres = std::sqrt(pres2) / (1.0 + f0_norm);
    const double eres = neq ? re.norm() / (1.0 + b_norm) : 0.0;
    const double dres = rd.norm() / (1.0 + c_norm);
    res.z = z;
    res.X = X;
    res.w = w;
    res.pobj = pobj;
    res.dobj = dobj;
    res.gap = gap;
    res.pres = pres;
    res.eres = eres;
    res.dres = dres;
    if (pres <= opts.feas_tol && eres <= opts.feas_tol && dres <= opts.feas_tol &&
        gap <= opts.gap_tol && comp <= opts.gap_tol) {
      res.converged = true;
      return res;
    }
    if (early && early(z)) {
      res.early_stop = true;
      return res;
    }
    if (iter == opts.max_iterations) break;
    if (!z.allFinite() || z.cwiseAbs().maxCoeff() > 1e9 * z_scale) break;

    // Scaling and Schur complement.
    bool ok = true;
    for (size_t k = 0; k < nb && ok; ++k) ok = nt_scaling(X[k], S[k], sc[k]);
    if (!ok) break;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m + neq, m + neq);
    std::vector<std::vector<Eigen::MatrixXd>> WFW(nb);
    for (size_t k = 0; k < nb; ++k) {
      const auto& blk = p.blocks[k];
      const Eigen::MatrixXd& W = sc[k].W;
      WFW[k].reserve(blk.terms.size());
      for (const auto& [v, mat] : blk.terms) WFW[k].push_back(W * mat * W);
      for (size_t i = 0; i < blk.terms.size(); ++i) {
        for (size_t j = i; j < blk.terms.size(); ++j) {
          const double val = frob_inner(blk.terms[i].second, WFW[k][j]);
          K(blk.terms[i].first, blk.terms[j].first) += val;
          if (i != j) K(blk.terms[j].first, blk.terms[i].first) += val;
        }
      }
    }
    double maxdiag = 0.0;
    for (int i = 0; i < m; ++i) maxdiag = std::max(maxdiag, K(i, i));
    const double reg = 1e-15 * (1.0 + maxdiag);
    for (int i = 0; i < m; ++i) K(i, i) += reg;
    if (neq > 0) {
      K.topRightCorner(m, neq) = A.transpose();
      K.bottomLeftCorner(neq, m) = A;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);

    // Solves for (dz, dw, dS, dX) given scaled right-hand sides Rt[k].
    auto direction = [&](const std::vector<Eigen::MatrixXd>& Rt, Eigen::VectorXd& dz,
                         Eigen::VectorXd& dw, std::vector<Eigen::MatrixXd>& dS,
                         std::vector<Eigen::MatrixXd>& dX) {
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + neq);
      std::vector<Eigen::MatrixXd> GRG(nb);
      for (size_t k = 0; k < nb; ++k) {
        GRG[k] = sc[k].G * Rt[k] * sc[k].G.transpose();
        const Eigen::MatrixXd Q = GRG[k] - sc[k].W * RS[k] * sc[k].W;
        for (const auto& [v, mat] : p.blocks[k].terms) rhs(v) += frob_inner(Q, mat);
      }
      rhs.head(m) -= rd;
      if (neq > 0) rhs.tail(neq) = re;
      Eigen::VectorXd sol = lu.solve(rhs);
      sol += lu.solve(rhs - K * sol);
      dz = sol.head(m);
      dw = neq ? Eigen::VectorXd(-sol.tail(neq)) : Eigen::VectorXd(0);
      dS.resize(nb);
      dX.resize(nb);
      auto assemble = [&]() {
        for (size_t k = 0; k < nb; ++k) {
          dS[k] = RS[k];
          for (const auto& [v, mat] : p.blocks[k].terms) dS[k] += dz(v) * mat;
          dS[k] = sym(dS[k]);
          dX[k] = sym(GRG[k] - sc[k].W * dS[k] * sc[k].W);
        }
      };
      assemble();
      // Refine against the dual equation evaluated through dX itself, which
      // is what the next residual sees; M alone loses accuracy as mu -> 0.
      for (int pass = 0; pass < 2; ++pass) {
        Eigen::VectorXd e = rd;
        for (size_t k = 0; k < nb; ++k) {
          for (const auto& [v, mat] : p.blocks[k].terms) e(v) -= frob_inner(mat, dX[k]);
        }
        if (neq > 0) e -= A.transpose() * dw;
        Eigen::VectorXd r2 = Eigen::VectorXd::Zero(m + neq);
        r2.head(m) = -e;
        if (neq > 0) r2.tail(neq) = re - A * dz;
        if (r2.norm() <= 1e-15 * (1.0 + rhs.norm())) break;
        const Eigen::VectorXd corr = lu.solve(r2);
        dz += corr.head(m);
        if (neq > 0) dw -= corr.tail(neq);
        assemble();
      }
    };

    std::vector<Eigen::LLT<Eigen::MatrixXd>> cholX, cholS;
    cholX.reserve(nb);
    cholS.reserve(nb);
    for (size_t k = 0; k < nb; ++k) {
      cholX.emplace_back(X[k]);
      cholS.emplace_back(S[k]);
    }
    auto step_lengths = [&](const std::vector<Eigen::MatrixXd>& dS,
                            const std::vector<Eigen::MatrixXd>& dX, double& ap, double& ad) {
      ap = std::numeric_limits<double>::infinity();
      ad = std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < nb; ++k) {
        ap = std::min(ap, max_step(cholS[k], dS[k]));
        ad = std::min(ad, max_step(cholX[k], dX[k]));
      }
    };

    // Predictor.
    std::vector<Eigen::MatrixXd> Rt(nb);
    for (size_t k = 0; k < nb; ++k) Rt[k] = Eigen::MatrixXd((-sc[k].d).asDiagonal());
    Eigen::VectorXd dz, dw;
    std::vector<Eigen::MatrixXd> dS, dX;
    direction(Rt, dz, dw, dS, dX);
    double ap, ad;
    step_lengths(dS, dX, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double xs_aff = 0.0;
    for (size_t k = 0; k < nb; ++k) xs_aff += frob_inner(X[k] + ad * dX[k], S[k] + ap * dS[k]);
    const double mu_aff = xs_aff / total_dim;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // Corrector with the Mehrotra second-order term in the scaled space.
    for (size_t k = 0; k < nb; ++k) {
      const Eigen::MatrixXd dXt = sc[k].Ginv * dX[k] * sc[k].Ginv.transpose();
      const Eigen::MatrixXd dSt = sc[k].G.transpose() * dS[k] * sc[k].G;
      const Eigen::MatrixXd prod = sym(dXt * dSt);
      const Eigen::VectorXd& d = sc[k].d;
      const Eigen::Index s = d.size();
      Eigen::MatrixXd r(s, s);
      for (Eigen::Index i = 0; i < s; ++i) {
        for (Eigen::Index j = 0; j < s; ++j) {
          double num = -prod(i, j);
          if (i == j) num += sigma * mu - d(i) * d(i);
          r(i, j) = 2.0 * num / (d(i) + d(j));
        }
      }
      Rt[k] = r;
    }
    direction(Rt, dz, dw, dS, dX);
    step_lengths(dS, dX, ap, ad);
    const double tau = 0.98;
    ap = std::min(1.0, tau * ap);
    ad = std::min(1.0, tau * ad);

    if (opts.trace) {
      *opts.trace << "iter " << iter << " gap " << gap << " pres " << pres << " eres " << eres
                  << " dres " << dres << " mu " << mu << " sigma " << sigma << " ap " << ap
                  << " ad " << ad << "\n";
    }

    z += ap * dz;
    for (size_t k = 0; k < nb; ++k) {
      S[k] = sym(S[k] + ap * dS[k]);
      X[k] = sym(X[k] + ad * dX[k]);
    }
    if (neq > 0) w += ad * dw;

    if (ap < 1e-9 && ad < 1e-9) {
      if (++stall >= 3) break;
    } else {
      stall = 0;
    }
  }
  return res;
}

SdpSolution to_solution(const IpmResult& r, SdpStatus status) {
  SdpSolution s;
  s.status = status;
  s.z = r.z;
  s.dual_blocks = r.X;
  s.eq_multipliers = r.w;
  s.primal_objective = r.pobj;
  s.dual_objective = r.dobj;
  s.relative_gap = r.gap;
  s.primal_residual = r.pres;
  s.equality_residual = r.eres;
  s.dual_residual = r.dres;
  s.iterations = r.iterations;
  return s;
}

SdpProblem with_reduced_equalities(const SdpProblem& p, const ReducedEqualities& red) {
  SdpProblem q = p;
  q.eq_matrix = red.A;
  q.eq_rhs = red.b;
  return q;
}

// min t  s.t.  F(z) + t I >= 0,  t + 1 >= 0,  A z = b.  Variable t is last.
SdpProblem phase_one_problem(const SdpProblem& p) {
  const int m = p.num_vars;
  SdpProblem q(m + 1);
  q.objective(m) = 1.0;
  for (const auto& blk : p.blocks) {
    SdpBlock nbk = blk;
    nbk.terms.emplace_back(m, Eigen::MatrixXd::Identity(blk.size, blk.size));
    q.blocks.push_back(std::move(nbk));
  }
  SdpBlock lower(1);
  lower.constant(0, 0) = 1.0;
  lower.terms.emplace_back(m, Eigen::MatrixXd::Ones(1, 1));
  q.blocks.push_back(std::move(lower));
  q.eq_matrix = Eigen::MatrixXd::Zero(p.eq_matrix.rows(), m + 1);
  q.eq_matrix.leftCols(m) = p.eq_matrix;
  q.eq_rhs = p.eq_rhs;
  return q;
}

// min c^T d  s.t.  sum d_i F_i >= 0,  A d = 0,  -1 <= d_i <= 1.
SdpProblem recession_problem(const SdpProblem& p) {
  const int m = p.num_vars;
  SdpProblem q(m);
  q.objective = p.objective;
  for (const auto& blk : p.blocks) {
    SdpBlock nbk = blk;
    nbk.constant.setZero();
    q.blocks.push_back(std::move(nbk));
  }
  for (int i = 0; i < m; ++i) {
    for (double sg : {1.0, -1.0}) {
      SdpBlock side(1);
      side.constant(0, 0) = 1.0;
      side.terms.emplace_back(i, sg * Eigen::MatrixXd::Ones(1, 1));
      q.blocks.push_back(std::move(side));
    }
  }
  q.eq_matrix = p.eq_matrix;
  q.eq_rhs = Eigen::VectorXd::Zero(p.eq_rhs.size());
  return q;
}

struct PhaseOne {
  bool converged = false;
  double margin = 0.0;
  Eigen::VectorXd z;
};

PhaseOne run_phase_one(const SdpProblem& p, const SdpOptions& opts) {
  const SdpProblem q = phase_one_problem(p);
  const int m = p.num_vars;
  const double b_norm = p.eq_rhs.size() ? p.eq_rhs.norm() : 0.0;
  auto early = [&](const Eigen::VectorXd& zt) {
    const Eigen::VectorXd z = zt.head(m);
    if (p.eq_rhs.size() && (p.eq_matrix * z - p.eq_rhs).norm() > opts.feas_tol * (1.0 + b_norm)) {
      return false;
    }
    return min_block_eigenvalue(p, z) > 0.0;
  };
  IpmResult r = run_ipm(q, opts, early);
  PhaseOne out;
  out.z = r.z.head(m);
  if (r.early_stop) {
    out.converged = true;
    out.margin = -min_block_eigenvalue(p, out.z);
  } else {
    out.converged = r.converged;
    out.margin = r.z(m);
  }
  return out;
}

}  // namespace

FeasibilityResult feasible_point(const SdpProblem& p, const SdpOptions& opts) {
  p.validate();
  FeasibilityResult out;
  const ReducedEqualities red = reduce_equalities(p.eq_matrix, p.eq_rhs);
  if (!red.consistent) {
    out.status = SdpStatus::Infeasible;
    out.margin = red.inconsistency;
    return out;
  }
  const SdpProblem q = with_reduced_equalities(p, red);
  if (q.blocks.empty()) {
    Eigen::VectorXd z = q.eq_matrix.rows() ? Eigen::VectorXd(q.eq_matrix.completeOrthogonalDecomposition().solve(q.eq_rhs))
                                           : Eigen::VectorXd(Eigen::VectorXd::Zero(q.num_vars));
    out.status = SdpStatus::Optimal;
    out.margin = 0.0;
    out.point = z;
    return out;
  }
  PhaseOne ph = run_phase_one(q, opts);
  if (!ph.converged) {
    out.status = SdpStatus::NumericalTrouble;
    out.margin = ph.margin;
    return out;
  }
  out.margin = ph.margin;
  if (ph.margin > opts.feas_tol) {
    out.status = SdpStatus::Infeasible;
    return out;
  }
  const double b_norm = p.eq_rhs.size() ? p.eq_rhs.norm() : 0.0;
  const double eq_res = p.eq_rhs.size() ? (p.eq_matrix * ph.z - p.eq_rhs).norm() / (1.0 + b_norm) : 0.0;
  const double lmin = min_block_eigenvalue(p, ph.z);
  out.status = SdpStatus::Optimal;
  if (eq_res <= opts.feas_tol && lmin >= -opts.feas_tol) out.point = ph.z;
  return out;
}

SdpSolution solve(const SdpProblem& p, const SdpOptions& opts) {
  p.validate();
  const ReducedEqualities red = reduce_equalities(p.eq_matrix, p.eq_rhs);
  if (!red.consistent) {
    SdpSolution s;
    s.status = SdpStatus::Infeasible;
    s.z = Eigen::VectorXd::Zero(p.num_vars);
    s.equality_residual = red.inconsistency;
    return s;
  }
  const SdpProblem q = with_reduced_equalities(p, red);
  IpmResult r = run_ipm(q, opts);
  if (r.converged) {
    SdpSolution s = to_solution(r, SdpStatus::Optimal);
    // Report multipliers against the caller's rows; dropped rows get zero.
    if (red.A.rows() != p.eq_matrix.rows()) {
      Eigen::VectorXd full = Eigen::VectorXd::Zero(p.eq_matrix.rows());
      Eigen::Index k = 0;
      for (Eigen::Index i = 0; i < p.eq_matrix.rows() && k < red.A.rows(); ++i) {
        if (p.eq_matrix.row(i) == red.A.row(k) && p.eq_rhs(i) == red.b(k)) full(i) = s.eq_multipliers(k++);
      }
      s.eq_multipliers = full;
    }
    return s;
  }

  // Classification of a failed run.
  SdpSolution s = to_solution(r, SdpStatus::NumericalTrouble);
  if (q.blocks.empty()) return s;
  PhaseOne ph = run_phase_one(q, opts);
  if (!ph.converged) return s;
  if (ph.margin > 100.0 * opts.feas_tol) {
    s.status = SdpStatus::Infeasible;
    return s;
  }
  if (ph.margin > opts.feas_tol) return s;
  IpmResult rec = run_ipm(recession_problem(q), opts);
  if (rec.converged && rec.pobj < -opts.unbounded_tol * (1.0 + q.objective.lpNorm<1>())) {
    s.status = SdpStatus::Unbounded;
    s.primal_objective = -std::numeric_limits<double>::infinity();
  }
  return s;
}

}  // namespace lmirep
