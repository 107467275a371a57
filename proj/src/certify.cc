#include "lmirep/certify.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace lmirep {

const char* to_string(SosStatus s) {
  switch (s) {
    case SosStatus::Certified: return "certified";
    case SosStatus::NotSos: return "not-sos";
    case SosStatus::Indeterminate: return "indeterminate";
  }
  return "?";
}

const char* to_string(ProbeStatus s) {
  switch (s) {
    case ProbeStatus::Pass: return "PASS";
    case ProbeStatus::Fail: return "FAIL";
    case ProbeStatus::Indeterminate: return "INDETERMINATE";
  }
  return "?";
}

const char* to_string(ConstraintVerdict v) {
  switch (v) {
    case ConstraintVerdict::SosConcave: return "SOS-CONCAVE";
    case ConstraintVerdict::StrictQcOnSamples: return "STRICT-QC-ON-SAMPLES";
    case ConstraintVerdict::NecessaryViolated: return "NECESSARY-VIOLATED";
    case ConstraintVerdict::RedundantSuspect: return "REDUNDANT-SUSPECT";
    case ConstraintVerdict::NotActive: return "NOT-ACTIVE";
    case ConstraintVerdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// sos-concavity

double SosConcavityCertificate::form(const Eigen::VectorXd& w, const Eigen::VectorXd& x) const {
  Eigen::VectorXd e(static_cast<Eigen::Index>(index.size()));
  for (size_t p = 0; p < index.size(); ++p) {
    const auto& [i, alpha] = index[p];
    double m = 1.0;
    for (int k = 0; k < alpha.dim(); ++k) m *= std::pow(x(k), alpha[k]);
    e(static_cast<Eigen::Index>(p)) = w(i) * m;
  }
  return e.dot(Q * e);
}

namespace {

using Pair = std::pair<int, ExponentVector>;

// Coefficient table of the upper triangle of -hess g: (i, j) -> gamma -> c.
using EntryCoeffs = std::map<std::pair<int, int>, std::map<ExponentVector, double>>;

EntryCoeffs negated_hessian(const Polynomial& g) {
  const int n = g.dim();
  const PolyMatrix H = g.hessian();
  EntryCoeffs out;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      auto& m = out[{i, j}];
      for (const auto& [alpha, c] : H(i, j).terms()) m[alpha] = -c;
    }
  }
  return out;
}

// Equation (i, j, gamma): sum over index pairs (p, q) whose rows are (i, j)
// and exponents add to gamma.
struct Equation {
  std::vector<std::pair<int, int>> pairs;  // (p, q), p <= q in index order
  std::vector<double> weights;
  double rhs = 0.0;
};

std::map<std::tuple<int, int, ExponentVector>, Equation> build_equations(
    const std::vector<Pair>& index, const EntryCoeffs& H) {
  std::map<std::tuple<int, int, ExponentVector>, Equation> eqs;
  for (const auto& [ij, m] : H) {
    for (const auto& [gamma, c] : m) eqs[{ij.first, ij.second, gamma}].rhs = c;
  }
  for (size_t p = 0; p < index.size(); ++p) {
    for (size_t q = p; q < index.size(); ++q) {
      int i = index[p].first;
      int j = index[q].first;
      if (i > j) std::swap(i, j);
      const ExponentVector gamma = index[p].second + index[q].second;
      Equation& e = eqs[{i, j, gamma}];
      e.pairs.emplace_back(static_cast<int>(p), static_cast<int>(q));
      // Q_pq and Q_qp both contribute on the diagonal rows when p != q.
      e.weights.push_back(index[p].first == index[q].first && p != q ? 2.0 : 1.0);
    }
  }
  return eqs;
}

}  // namespace

SosConcavityResult check_sos_concave(const Polynomial& g, const CertifyOptions& opts) {
  const int n = g.dim();
  SosConcavityResult out;
  const EntryCoeffs H = negated_hessian(g);
  double scale = 1.0;
  for (const auto& [ij, m] : H) {
    for (const auto& [gamma, c] : m) scale = std::max(scale, std::abs(c));
  }
  const double zero_tol = 1e-14 * scale;

  if (g.degree() <= 1) {
    SosConcavityCertificate c;
    c.n = n;
    c.scale = scale;
    out.status = SosStatus::Certified;
    out.certificate = c;
    out.margin = 0.0;
    return out;
  }

  // Row i uses monomials with degrees between half the lowest and half the
  // highest degree present in the diagonal entry (i, i).
  std::vector<Pair> index;
  for (int i = 0; i < n; ++i) {
    const auto& m = H.at({i, i});
    if (m.empty()) continue;
    int lo = std::numeric_limits<int>::max();
    int hi = 0;
    for (const auto& [gamma, c] : m) {
      lo = std::min(lo, gamma.degree());
      hi = std::max(hi, gamma.degree());
    }
    for (const auto& alpha : monomial_vector(n, hi / 2)) {
      if (2 * alpha.degree() >= lo) index.emplace_back(i, alpha);
    }
  }

  // Facial reduction: a diagonal equation whose only terms are diagonal Gram
  // entries and whose right-hand side is zero forces those rows to vanish.
  for (bool changed = true; changed;) {
    changed = false;
    const auto eqs = build_equations(index, H);
    std::set<size_t> kill;
    for (const auto& [key, e] : eqs) {
      if (std::get<0>(key) != std::get<1>(key) || e.pairs.empty()) continue;
      const bool all_diag =
          std::all_of(e.pairs.begin(), e.pairs.end(), [](const auto& pq) { return pq.first == pq.second; });
      if (!all_diag) continue;
      if (e.rhs < -zero_tol) {
        out.status = SosStatus::NotSos;
        return out;
      }
      if (std::abs(e.rhs) <= zero_tol) {
        for (const auto& pq : e.pairs) kill.insert(static_cast<size_t>(pq.first));
      }
    }
    if (!kill.empty()) {
      std::vector<Pair> next;
      for (size_t p = 0; p < index.size(); ++p) {
        if (!kill.count(p)) next.push_back(index[p]);
      }
      index = std::move(next);
      changed = true;
    }
  }

  const auto eqs = build_equations(index, H);
  for (const auto& [key, e] : eqs) {
    if (e.pairs.empty() && std::abs(e.rhs) > zero_tol) {
      out.status = SosStatus::NotSos;
      return out;
    }
  }

  const int m = static_cast<int>(index.size());
  SosConcavityCertificate cert;
  cert.n = n;
  cert.index = index;
  cert.scale = scale;
  if (m == 0) {
    cert.Q = Eigen::MatrixXd::Zero(0, 0);
    out.status = SosStatus::Certified;
    out.certificate = cert;
    return out;
  }

  // Variables: upper triangle of Q, row-major.
  std::map<std::pair<int, int>, int> var;
  for (int p = 0; p < m; ++p) {
    for (int q = p; q < m; ++q) var[{p, q}] = static_cast<int>(var.size());
  }
  const int nv = static_cast<int>(var.size());
  SdpProblem prob(nv);
  SdpBlock block(m);
  for (const auto& [pq, v] : var) {
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(m, m);
    E(pq.first, pq.second) = 1.0;
    E(pq.second, pq.first) = 1.0;
    block.terms.emplace_back(v, E);
  }
  prob.blocks.push_back(std::move(block));
  for (const auto& [key, e] : eqs) {
    if (e.pairs.empty()) continue;
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    for (size_t k = 0; k < e.pairs.size(); ++k) row(var.at(e.pairs[k])) += e.weights[k];
    prob.add_equality(row, e.rhs);
  }

  const FeasibilityResult fr = feasible_point(prob, opts.sdp);
  out.margin = fr.margin;
  if (fr.status == SdpStatus::Infeasible) {
    out.status = SosStatus::NotSos;
    return out;
  }
  if (fr.status != SdpStatus::Optimal || !fr.point) {
    out.status = SosStatus::Indeterminate;
    return out;
  }
  // Project onto the coefficient-matching subspace so the identity holds to
  // rounding; the PSD margin moves by at most the size of the correction.
  Eigen::VectorXd z = *fr.point;
  z -= prob.eq_matrix.completeOrthogonalDecomposition().solve(prob.eq_matrix * z - prob.eq_rhs);

  cert.Q = Eigen::MatrixXd::Zero(m, m);
  for (const auto& [pq, v] : var) {
    cert.Q(pq.first, pq.second) = z(v);
    cert.Q(pq.second, pq.first) = z(v);
  }
  double res = 0.0;
  for (const auto& [key, e] : eqs) {
    double lhs = 0.0;
    for (size_t k = 0; k < e.pairs.size(); ++k) lhs += e.weights[k] * cert.Q(e.pairs[k].first, e.pairs[k].second);
    res = std::max(res, std::abs(lhs - e.rhs));
  }
  cert.residual = res;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cert.Q);
  cert.min_eigenvalue = es.eigenvalues()(0);
  const double top = std::max(1.0, es.eigenvalues()(m - 1));
  cert.rank = static_cast<int>((es.eigenvalues().array() > 1e-9 * top).count());
  if (cert.min_eigenvalue < -opts.sdp.feas_tol * top) {
    out.status = SosStatus::Indeterminate;
    return out;
  }
  out.status = SosStatus::Certified;
  out.certificate = std::move(cert);
  return out;
}

// ---------------------------------------------------------------------------
// quasi-concavity

Eigen::MatrixXd tangent_projector(const Eigen::VectorXd& grad) {
  const auto n = grad.size();
  const double nn = grad.squaredNorm();
  if (nn == 0.0) return Eigen::MatrixXd::Identity(n, n);
  return Eigen::MatrixXd::Identity(n, n) - grad * grad.transpose() / nn;
}

PointVerdict check_quasi_concave_at(const Polynomial& g, const Eigen::VectorXd& u,
                                    const CertifyOptions& opts) {
  if (u.size() != g.dim()) throw DimensionError("check_quasi_concave_at: point dimension mismatch");
  const int n = g.dim();
  PointVerdict v;
  v.point = u;
  const Eigen::VectorXd grad = g.eval_gradient(u);
  const Eigen::MatrixXd H = g.eval_hessian(u);
  const double coef = g.max_abs_coefficient();
  v.gradient_norm = grad.norm();
  v.nonsingular = v.gradient_norm > opts.grad_tol * coef;
  double thresh = 0.0;
  if (v.nonsingular) {
    if (n == 1) {
      v.tangent_eigenvalues = Eigen::VectorXd(0);
      v.quasi_concave = true;
      v.strictly_quasi_concave = true;
      return v;
    }
    Eigen::MatrixXd G = grad;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    const Eigen::MatrixXd Qf = qr.householderQ();
    const Eigen::MatrixXd B = Qf.rightCols(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-B.transpose() * H * B);
    v.tangent_eigenvalues = es.eigenvalues();
    thresh = opts.eig_tol * v.gradient_norm;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-H);
    v.tangent_eigenvalues = es.eigenvalues();
    thresh = opts.eig_tol * coef;
  }
  const double lmin = v.tangent_eigenvalues(0);
  v.quasi_concave = lmin >= -thresh;
  v.strictly_quasi_concave = lmin >= thresh && thresh > 0.0;
  return v;
}

// ---------------------------------------------------------------------------
// boundary sampling

namespace {

double scaled_min(const BasicSet& s, const Eigen::VectorXd& x) {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& h : s.inequalities) v = std::min(v, h.eval(x) / std::max(1.0, h.max_abs_coefficient()));
  return v;
}

std::vector<int> active_at(const BasicSet& s, const Eigen::VectorXd& u, double tol) {
  std::vector<int> a;
  for (size_t i = 0; i < s.inequalities.size(); ++i) {
    const auto& h = s.inequalities[i];
    if (std::abs(h.eval(u)) <= tol * std::max(1.0, h.max_abs_coefficient())) a.push_back(static_cast<int>(i));
  }
  return a;
}

}  // namespace

std::vector<BoundaryPoint> sample_boundary(const BasicSet& s, const Box& box, int count,
                                           uint64_t seed, const BoundarySampleOptions& opts) {
  s.validate();
  if (!s.equalities.empty()) throw std::invalid_argument("sample_boundary: sets with equalities have no interior");
  if (s.inequalities.empty()) throw std::invalid_argument("sample_boundary: set has no inequalities");
  if (box.dim() != s.n) throw DimensionError("sample_boundary: box dimension mismatch");
  Rng rng(seed);
  std::vector<Eigen::VectorXd> interior;
  if (opts.interior_hint) {
    if (!(scaled_min(s, *opts.interior_hint) > 0)) {
      throw std::invalid_argument("sample_boundary: interior hint is not strictly inside");
    }
    interior.push_back(*opts.interior_hint);
  }
  for (int k = 0; k < opts.interior_draws && interior.size() < 16; ++k) {
    Eigen::VectorXd x = uniform_in_box(rng, box);
    if (scaled_min(s, x) > 0) interior.push_back(std::move(x));
  }
  if (interior.empty()) {
    throw std::runtime_error("sample_boundary: no interior point found in the box; supply an interior hint");
  }
  std::vector<BoundaryPoint> out;
  const int max_rays = 50 * count + 100;
  for (int ray = 0; ray < max_rays && static_cast<int>(out.size()) < count; ++ray) {
    const Eigen::VectorXd& p = interior[static_cast<size_t>(ray) % interior.size()];
    const Eigen::VectorXd d = uniform_direction(rng, s.n);
    const double T = box.exit_time(p, d);
    auto phi = [&](double t) { return scaled_min(s, p + t * d); };
    if (phi(T) >= 0) continue;
    double a = -1.0;
    double b = T;
    for (int k = opts.steps_per_ray - 1; k >= 0; --k) {
      const double t = T * k / opts.steps_per_ray;
      if (phi(t) >= 0) {
        a = t;
        break;
      }
      b = t;
    }
    if (a < 0) continue;
    for (int it = 0; it < 200 && b - a > 1e-16 * (1.0 + b); ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      (phi(mid) >= 0 ? a : b) = mid;
    }
    BoundaryPoint bp;
    bp.point = p + a * d;
    bp.active = active_at(s, bp.point, opts.active_tol);
    if (bp.active.empty()) continue;
    out.push_back(std::move(bp));
  }
  return out;
}

// ---------------------------------------------------------------------------
// redundancy

RedundancyProbe probe_redundancy(const BasicSet& s, int j, const Eigen::VectorXd& u, double radius,
                                 int samples, uint64_t seed) {
  if (j < 0 || j >= static_cast<int>(s.inequalities.size())) {
    throw std::out_of_range("probe_redundancy: constraint index out of range");
  }
  RedundancyProbe r;
  r.radius = radius;
  r.samples = samples;
  Rng rng(seed);
  BasicSet others = s;
  others.inequalities.erase(others.inequalities.begin() + j);
  const Polynomial& h = s.inequalities[static_cast<size_t>(j)];
  const double hs = std::max(1.0, h.max_abs_coefficient());
  for (int k = 0; k < samples; ++k) {
    const Eigen::VectorXd x = uniform_in_ball(rng, u, radius);
    if (!membership(others, x, 0.0)) continue;
    ++r.others_satisfied;
    if (h.eval(x) < -1e-12 * hs) ++r.cut_by_constraint;
  }
  r.redundant_suspect = r.cut_by_constraint == 0;
  return r;
}

// ---------------------------------------------------------------------------
// PDLH probe

PdlhReport pdlh_probe(const BasicSet& s, const Eigen::VectorXd& u, double delta, int directions,
                      uint64_t seed, const PdlhOptions& opts) {
  s.validate();
  if (!(delta > 0)) throw std::invalid_argument("pdlh_probe: delta must be positive");
  if (u.size() != s.n) throw DimensionError("pdlh_probe: center dimension mismatch");
  const int n = s.n;
  PdlhReport rep;
  rep.center = u;
  rep.delta = delta;
  rep.seed = seed;

  NlpProblem prob;
  prob.n = n;
  prob.inequalities = s.inequalities;
  prob.inequalities.push_back(BallConstraint(u, delta).polynomial());
  prob.equalities = s.equalities;

  std::vector<Eigen::VectorXd> grid;
  for (const auto& g : cube_grid(n, opts.grid_per_axis, 3)) {
    if (g.norm() <= 1.0 + 1e-12) grid.push_back(u + delta * g);
  }
  rep.grid_points = static_cast<int>(grid.size());

  Rng start_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  bool any_fail = false;
  bool any_indet = false;
  for (const auto& l : probe_directions(n, directions, seed, opts.include_axes)) {
    PdlhDirection d;
    d.direction = l;
    prob.objective = Polynomial(n);
    for (int i = 0; i < n; ++i) prob.objective.add_term(ExponentVector::unit(n, i), l(i));
    std::vector<Eigen::VectorXd> starts = {u, u - 0.9 * delta * l};
    for (int k = 0; k < opts.extra_starts; ++k) starts.push_back(uniform_in_ball(start_rng, u, delta));
    const LocalResult r = minimize_multistart(prob, starts, opts.local);
    d.minimizer = r.x;
    d.value = r.value;
    d.kkt_residual = r.kkt_residual;
    d.ineq_multipliers = r.ineq_multipliers;
    d.eq_multipliers = r.eq_multipliers;
    if (!r.converged || r.kkt_residual > opts.kkt_tol) {
      d.status = ProbeStatus::Indeterminate;
      any_indet = true;
      rep.directions.push_back(std::move(d));
      continue;
    }
    double lmin = std::numeric_limits<double>::infinity();
    for (const auto& x : grid) {
      const Eigen::MatrixXd H = lagrangian_hessian(prob, x, r.ineq_multipliers, r.eq_multipliers);
      lmin = std::min(lmin, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues()(0));
    }
    d.min_hessian_eigenvalue = lmin;
    d.status = lmin > opts.eig_tol ? ProbeStatus::Pass : ProbeStatus::Fail;
    any_fail = any_fail || d.status == ProbeStatus::Fail;
    rep.directions.push_back(std::move(d));
  }
  rep.verdict = any_fail ? "PROBE-FAIL" : any_indet ? "PROBE-INDETERMINATE" : "PROBE-PASS";
  return rep;
}

// ---------------------------------------------------------------------------
// classification

namespace {

struct TouchSearch {
  bool found = false;
  bool positive = false;
  Eigen::VectorXd point;
};

// Minimizes h_j over the other constraints of the block inside the box.
TouchSearch touch_search(const BasicSet& s, int j, const Box& box, uint64_t seed) {
  NlpProblem p;
  p.n = s.n;
  p.objective = s.inequalities[static_cast<size_t>(j)];
  for (size_t i = 0; i < s.inequalities.size(); ++i) {
    if (static_cast<int>(i) != j) p.inequalities.push_back(s.inequalities[i]);
  }
  p.equalities = s.equalities;
  for (int i = 0; i < s.n; ++i) {
    Polynomial lo = Polynomial::variable(s.n, i) - Polynomial::constant(s.n, box.lo(i));
    Polynomial hi = Polynomial::constant(s.n, box.hi(i)) - Polynomial::variable(s.n, i);
    p.inequalities.push_back(lo);
    p.inequalities.push_back(hi);
  }
  Rng rng(seed);
  std::vector<Eigen::VectorXd> starts;
  const Eigen::VectorXd mid = 0.5 * (box.lo + box.hi);
  const Eigen::VectorXd half = 0.5 * (box.hi - box.lo);
  for (const auto& g : cube_grid(s.n, 3, 3)) starts.push_back(mid + 0.5 * half.cwiseProduct(g));
  for (int k = 0; k < 8; ++k) starts.push_back(uniform_in_box(rng, box));
  const LocalResult r = minimize_multistart(p, starts);
  TouchSearch t;
  if (!r.converged) return t;
  const double scale = std::max(1.0, p.objective.max_abs_coefficient());
  t.point = r.x;
  if (std::abs(r.value) <= 1e-7 * scale) t.found = true;
  else if (r.value > 0) t.positive = true;
  return t;
}

}  // namespace

ClassifyReport classify(const UnionSet& s, const Box& box, const ClassifyOptions& opts) {
  s.validate();
  if (box.dim() != s.n) throw DimensionError("classify: box dimension mismatch");
  ClassifyReport rep;
  rep.seed = opts.seed;
  rep.box = box;
  rep.tolerances = opts.certify;
  const double point_tol = 1e-7;

  for (size_t b = 0; b < s.blocks.size(); ++b) {
    const BasicSet& blk = s.blocks[b];
    std::vector<BoundaryPoint> pts;
    if (blk.equalities.empty() && !blk.inequalities.empty()) {
      try {
        pts = sample_boundary(blk, box, opts.samples_per_block, opts.seed + b, opts.boundary);
      } catch (const std::runtime_error&) {
        // An empty interior leaves only the extra points and touch search.
      }
    }
    for (size_t j = 0; j < blk.inequalities.size(); ++j) {
      const Polynomial& h = blk.inequalities[j];
      ConstraintReport cr;
      cr.block = static_cast<int>(b);
      cr.constraint = static_cast<int>(j);
      cr.polynomial = h.to_string();
      const SosConcavityResult sos = check_sos_concave(h, opts.certify);
      cr.sos = sos.status;
      cr.certificate = sos.certificate;

      std::vector<Eigen::VectorXd> on;
      for (const auto& bp : pts) {
        if (std::find(bp.active.begin(), bp.active.end(), static_cast<int>(j)) != bp.active.end()) {
          on.push_back(bp.point);
        }
      }
      const double hs = std::max(1.0, h.max_abs_coefficient());
      for (const auto& x : opts.extra_points) {
        if (x.size() == s.n && membership(blk, x, point_tol) && std::abs(h.eval(x)) <= point_tol * hs) {
          on.push_back(x);
        }
      }
      bool never_active = false;
      if (on.empty()) {
        const TouchSearch t = touch_search(blk, static_cast<int>(j), box, opts.seed * 7919 + b * 31 + j);
        if (t.found) on.push_back(t.point);
        never_active = t.positive;
      }
      for (const auto& x : on) {
        PointVerdict v = check_quasi_concave_at(h, x, opts.certify);
        v.constraint = static_cast<int>(j);
        if (!v.nonsingular) ++cr.singular_points;
        cr.points.push_back(std::move(v));
      }

      const PointVerdict* bad = nullptr;
      bool all_strict = !cr.points.empty();
      for (const auto& v : cr.points) {
        if (v.nonsingular && !v.quasi_concave && !bad) bad = &v;
        all_strict = all_strict && v.strictly_quasi_concave;
      }
      if (sos.status == SosStatus::Certified) {
        cr.verdict = ConstraintVerdict::SosConcave;
      } else if (cr.points.empty()) {
        cr.verdict = never_active ? ConstraintVerdict::NotActive : ConstraintVerdict::Inconclusive;
      } else if (bad) {
        cr.violation_point = bad->point;
        cr.redundancy = probe_redundancy(blk, static_cast<int>(j), bad->point, opts.redundancy_radius,
                                         opts.redundancy_samples, opts.seed + 17 * j + b);
        cr.verdict = cr.redundancy->redundant_suspect ? ConstraintVerdict::RedundantSuspect
                                                      : ConstraintVerdict::NecessaryViolated;
      } else if (cr.singular_points == 0 && all_strict) {
        cr.verdict = ConstraintVerdict::StrictQcOnSamples;
      } else {
        cr.verdict = ConstraintVerdict::Inconclusive;
      }
      rep.constraints.push_back(std::move(cr));
    }
  }

  bool violated = false;
  bool sufficient = true;
  bool all_sos = true;
  for (const auto& c : rep.constraints) {
    violated = violated || c.verdict == ConstraintVerdict::NecessaryViolated;
    const bool ok = c.verdict == ConstraintVerdict::SosConcave ||
                    c.verdict == ConstraintVerdict::StrictQcOnSamples ||
                    c.verdict == ConstraintVerdict::NotActive;
    sufficient = sufficient && ok;
    all_sos = all_sos && (c.verdict == ConstraintVerdict::SosConcave ||
                          c.verdict == ConstraintVerdict::NotActive);
  }
  rep.verdict = violated ? "NECESSARY-VIOLATED" : sufficient ? "SUFFICIENT-PASS" : "INCONCLUSIVE";
  rep.route = !sufficient ? "none" : all_sos ? "sos-concave" : "strict-qc";
  return rep;
}

// ---------------------------------------------------------------------------
// reports

namespace {

nlohmann::json vec_json(const Eigen::VectorXd& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

nlohmann::json mat_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
  return rows;
}

std::string vec_text(const Eigen::VectorXd& v) {
  std::ostringstream o;
  o.precision(6);
  o << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) o << (i ? ", " : "") << v(i);
  o << ")";
  return o.str();
}

}  // namespace

nlohmann::json to_json(const SosConcavityCertificate& c) {
  nlohmann::json j;
  nlohmann::json idx = nlohmann::json::array();
  for (const auto& [i, alpha] : c.index) idx.push_back({{"row", i}, {"exponent", alpha.exponents()}});
  j["index"] = idx;
  j["gram"] = mat_json(c.Q);
  j["residual"] = c.residual;
  j["scale"] = c.scale;
  j["min_eigenvalue"] = c.min_eigenvalue;
  j["rank"] = c.rank;
  return j;
}

nlohmann::json to_json(const PointVerdict& v) {
  return {{"point", vec_json(v.point)},
          {"constraint", v.constraint},
          {"gradient_norm", v.gradient_norm},
          {"tangent_eigenvalues", vec_json(v.tangent_eigenvalues)},
          {"nonsingular", v.nonsingular},
          {"quasi_concave", v.quasi_concave},
          {"strictly_quasi_concave", v.strictly_quasi_concave}};
}

nlohmann::json to_json(const PdlhReport& r) {
  nlohmann::json dirs = nlohmann::json::array();
  for (const auto& d : r.directions) {
    dirs.push_back({{"direction", vec_json(d.direction)},
                    {"minimizer", vec_json(d.minimizer)},
                    {"value", d.value},
                    {"kkt_residual", d.kkt_residual},
                    {"ineq_multipliers", vec_json(d.ineq_multipliers)},
                    {"eq_multipliers", vec_json(d.eq_multipliers)},
                    {"min_hessian_eigenvalue", d.min_hessian_eigenvalue},
                    {"status", to_string(d.status)}});
  }
  return {{"center", vec_json(r.center)}, {"delta", r.delta},       {"seed", r.seed},
          {"grid_points", r.grid_points}, {"directions", dirs},     {"verdict", r.verdict},
          {"note", "sampled directions only; not a proof of the condition for every direction"}};
}

nlohmann::json to_json(const ClassifyReport& r) {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : r.constraints) {
    nlohmann::json j = {{"block", c.block},
                        {"constraint", c.constraint},
                        {"polynomial", c.polynomial},
                        {"sos", to_string(c.sos)},
                        {"singular_points", c.singular_points},
                        {"verdict", to_string(c.verdict)}};
    if (c.certificate) j["certificate"] = to_json(*c.certificate);
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : c.points) pts.push_back(to_json(p));
    j["points"] = pts;
    if (c.violation_point) j["violation_point"] = vec_json(*c.violation_point);
    if (c.redundancy) {
      j["redundancy"] = {{"redundant_suspect", c.redundancy->redundant_suspect},
                         {"radius", c.redundancy->radius},
                         {"samples", c.redundancy->samples},
                         {"others_satisfied", c.redundancy->others_satisfied},
                         {"cut_by_constraint", c.redundancy->cut_by_constraint}};
    }
    cs.push_back(std::move(j));
  }
  return {{"constraints", cs},
          {"verdict", r.verdict},
          {"route", r.route},
          {"seed", r.seed},
          {"box", {{"lo", vec_json(r.box.lo)}, {"hi", vec_json(r.box.hi)}}},
          {"tolerances", {{"eig_tol", r.tolerances.eig_tol}, {"grad_tol", r.tolerances.grad_tol},
                          {"feas_tol", r.tolerances.sdp.feas_tol}}},
          {"note", "quasi-concavity and redundancy verdicts come from sampled points, not proofs"}};
}

std::string to_text(const ClassifyReport& r) {
  std::ostringstream o;
  o << "verdict: " << r.verdict << " (route " << r.route << ", seed " << r.seed << ")\n";
  for (const auto& c : r.constraints) {
    o << "  block " << c.block << " constraint " << c.constraint << ": " << to_string(c.verdict)
      << "   [" << c.polynomial << " >= 0]\n";
    o << "    sos-concavity: " << to_string(c.sos);
    if (c.certificate) o << ", residual " << c.certificate->residual << ", rank " << c.certificate->rank;
    o << "\n";
    double lmin = std::numeric_limits<double>::infinity();
    for (const auto& p : c.points) {
      if (p.tangent_eigenvalues.size()) lmin = std::min(lmin, p.tangent_eigenvalues(0));
    }
    o << "    boundary points: " << c.points.size() << ", singular " << c.singular_points;
    if (std::isfinite(lmin)) o << ", min tangent eigenvalue " << lmin;
    o << "\n";
    if (c.violation_point) {
      o << "    quasi-concavity fails at " << vec_text(*c.violation_point);
      if (c.redundancy) {
        o << "; " << c.redundancy->cut_by_constraint << " of " << c.redundancy->others_satisfied
          << " nearby samples are cut by it";
      }
      o << "\n";
    }
  }
  o << "note: sampled evidence; quasi-concavity and redundancy are not proved\n";
  return o.str();
}

std::string to_text(const PdlhReport& r) {
  std::ostringstream o;
  o << r.verdict << " at " << vec_text(r.center) << ", delta " << r.delta << ", "
    << r.directions.size() << " directions, " << r.grid_points << " grid points\n";
  for (const auto& d : r.directions) {
    o << "  l = " << vec_text(d.direction) << ": " << to_string(d.status) << ", min Hessian eigenvalue "
      << d.min_hessian_eigenvalue << ", KKT residual " << d.kkt_residual << "\n";
  }
  return o.str();
}

}  // namespace lmirep
