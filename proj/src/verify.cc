#include "lmirep/verify.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lmirep/moment.h"

namespace lmirep {

const char* to_string(SupportStatus s) {
  switch (s) {
    case SupportStatus::Finite: return "finite";
    case SupportStatus::Unbounded: return "unbounded";
    case SupportStatus::Indeterminate: return "indeterminate";
  }
  return "?";
}

SupportValue support_lift(const LiftedRepresentation& rep, const Eigen::VectorXd& l,
                          const SdpOptions& opts) {
  const SdpSolution s = solve(support_problem(rep, l), opts);
  SupportValue v;
  v.sdp = s.status;
  if (s.status == SdpStatus::Optimal) {
    v.status = SupportStatus::Finite;
    v.value = s.primal_objective;
    v.x = s.z.head(rep.n);
  } else if (s.status == SdpStatus::NumericalTrouble && s.primal_residual <= opts.feas_tol &&
             s.equality_residual <= opts.feas_tol && s.relative_gap <= 1e-5 && s.dual_residual <= 1e-4) {
    v.status = SupportStatus::Finite;
    v.exact = false;
    v.value = s.primal_objective;
    v.x = s.z.head(rep.n);
  } else if (s.status == SdpStatus::Unbounded) {
    v.status = SupportStatus::Unbounded;
    v.value = -std::numeric_limits<double>::infinity();
  }
  return v;
}

namespace {

int grid_resolution(int n, int requested) {
  if (n <= 2) return requested;
  const int cap = static_cast<int>(std::floor(std::pow(2e6, 1.0 / n)));
  return std::max(2, std::min(requested, cap));
}

// 1e-12 slack lets grid nodes hit zero-width sets such as single points.
bool member(const UnionSet& s, const Eigen::VectorXd& x) { return membership(s, x, 1e-12); }

// Largest t with x - t l in s found by doubling then bisection; x must be a member.
Eigen::VectorXd push(const UnionSet& s, const Box& box, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& l, double h) {
  const Eigen::VectorXd d = -l.normalized();
  const double T = box.exit_time(x, d);
  double lo = 0.0;
  double hi = std::min(h, T);
  while (hi < T && member(s, x + hi * d)) {
    lo = hi;
    hi = std::min(2.0 * hi, T);
  }
  if (member(s, x + hi * d)) return x + hi * d;
  for (int it = 0; it < 80 && hi - lo > 1e-16 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (member(s, x + mid * d) ? lo : hi) = mid;
  }
  return x + lo * d;
}

}  // namespace

OracleValue support_oracle(const UnionSet& s, const Eigen::VectorXd& l, const Box& box,
                           const OracleOptions& opts) {
  s.validate();
  const int n = s.n;
  if (l.size() != n || box.dim() != n) throw DimensionError("support_oracle: dimension mismatch");
  for (const auto& b : s.blocks) {
    if (!b.equalities.empty()) throw std::invalid_argument("support_oracle: equality constraints are not supported");
  }
  const int r = grid_resolution(n, opts.resolution);
  const Eigen::VectorXd cell = (box.hi - box.lo) / (r - 1);
  std::vector<int> idx(static_cast<size_t>(n), 0);
  Eigen::VectorXd best_x;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x(n);
  while (true) {
    for (int i = 0; i < n; ++i) x(i) = box.lo(i) + idx[static_cast<size_t>(i)] * cell(i);
    const double v = l.dot(x);
    if (v < best && member(s, x)) {
      best = v;
      best_x = x;
    }
    int a = 0;
    while (a < n && ++idx[static_cast<size_t>(a)] == r) idx[static_cast<size_t>(a++)] = 0;
    if (a == n) break;
  }
  if (!std::isfinite(best)) throw std::runtime_error("support_oracle: no member of the set found in the box");

  // Lateral moves in l-perp followed by a push along -l to the boundary.
  Eigen::MatrixXd lateral(n, std::max(0, n - 1));
  if (n > 1) {
    Eigen::MatrixXd G = l.normalized();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    const Eigen::MatrixXd Q = qr.householderQ();
    lateral = Q.rightCols(n - 1);
  }
  double h = cell.maxCoeff();
  Eigen::VectorXd cur = push(s, box, best_x, l, h);
  double cur_v = l.dot(cur);
  int halvings = 0;
  for (int it = 0; it < 200 * (opts.refine_steps + 1) && halvings < opts.refine_steps; ++it) {
    Eigen::VectorXd cand_best;
    double cand_v = cur_v;
    for (int j = 0; j < n - 1; ++j) {
      for (double sg : {1.0, -1.0}) {
        const Eigen::VectorXd y = cur + sg * h * lateral.col(j);
        if (!box.contains(y) || !member(s, y)) continue;
        const Eigen::VectorXd z = push(s, box, y, l, h);
        const double zv = l.dot(z);
        if (zv < cand_v) {
          cand_v = zv;
          cand_best = z;
        }
      }
    }
    if (cand_best.size() && cand_v < cur_v - 1e-15 * (1.0 + std::abs(cur_v))) {
      cur = cand_best;
      cur_v = cand_v;
    } else {
      h *= 0.5;
      ++halvings;
    }
  }
  OracleValue out;
  out.value = cur_v;
  out.point = cur;
  out.error_bound = std::sqrt(static_cast<double>(n)) * cell.maxCoeff() * l.norm() +
                    box.diameter() * std::ldexp(1.0, -opts.refine_steps);
  return out;
}

VerifyReport compare(const LiftedRepresentation& rep, const UnionSet& s, const Box& box,
                     const VerifyOptions& opts) {
  rep.validate();
  s.validate();
  if (rep.n != s.n) throw DimensionError("compare: representation and set differ in dimension");
  VerifyReport r;
  r.tol = opts.tol;
  r.margin = 3.0 * opts.tol;
  r.seed = opts.seed;
  bool inconclusive = false;
  bool failed = false;
  for (const auto& l : probe_directions(s.n, opts.directions, opts.seed)) {
    DirectionResult d;
    d.direction = l;
    d.oracle = support_oracle(s, l, box, opts.oracle);
    d.lift = support_lift(rep, l, opts.sdp);
    if (d.lift.status != SupportStatus::Finite) {
      d.status = "inconclusive";
      inconclusive = true;
    } else {
      d.gap = d.lift.value - d.oracle.value;
      r.max_abs_gap = std::max(r.max_abs_gap, std::abs(d.gap));
      r.max_gap = r.directions.empty() ? d.gap : std::max(r.max_gap, d.gap);
      d.status = std::abs(d.gap) <= opts.tol ? "ok" : "violation";
      failed = failed || d.status == "violation";
    }
    r.directions.push_back(std::move(d));
  }

  Rng rng(opts.seed + 0x9e37ULL);
  for (int k = 0; k < opts.membership_samples; ++k) {
    const Eigen::VectorXd x = uniform_in_box(rng, box);
    bool deep_in = member(s, x);
    for (int i = 0; i < s.n && deep_in; ++i) {
      for (double sg : {1.0, -1.0}) {
        deep_in = deep_in && member(s, x + sg * r.margin * Eigen::VectorXd::Unit(s.n, i));
      }
    }
    bool clearly_out = false;
    for (const auto& d : r.directions) {
      if (d.direction.dot(x) < d.oracle.value - r.margin) clearly_out = true;
    }
    if (!deep_in && !clearly_out) continue;
    ++r.membership_tested;
    const Membership m = lift_membership(rep, x, opts.membership_tol, opts.sdp).verdict;
    if (m == Membership::Indeterminate) {
      ++r.membership_indeterminate;
      inconclusive = true;
    } else if (deep_in && m == Membership::Outside) {
      ++r.set_in_lift_out;
    } else if (clearly_out && m == Membership::Inside) {
      ++r.lift_in_set_out;
    }
  }
  failed = failed || r.set_in_lift_out > 0 || r.lift_in_set_out > 0;
  r.verdict = failed ? "FAIL" : inconclusive ? "INCONCLUSIVE" : "PASS";
  return r;
}

Box bounding_box(const UnionSet& s, const SdpOptions& opts) {
  s.validate();
  const int n = s.n;
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  for (const auto& b : s.blocks) {
    const MomentMode mode =
        b.inequalities.size() <= 6 ? MomentMode::Preordering : MomentMode::Module;
    const int N0 = minimum_order(b);
    bool done = false;
    for (int N = N0; N <= N0 + 2 && !done; ++N) {
      const LiftedRepresentation rep = build_moment_lmi(b, N, mode);
      Eigen::VectorXd blo = lo, bhi = hi;
      bool empty = false;
      bool bounded = true;
      for (int i = 0; i < n && !empty && bounded; ++i) {
        for (double sg : {1.0, -1.0}) {
          const SdpSolution sol = solve(support_problem(rep, sg * Eigen::VectorXd::Unit(n, i)), opts);
          if (sol.status == SdpStatus::Infeasible) {
            empty = true;
            break;
          }
          if (sol.status != SdpStatus::Optimal) {
            bounded = false;
            break;
          }
          if (sg > 0) blo(i) = std::min(blo(i), sol.primal_objective);
          else bhi(i) = std::max(bhi(i), -sol.primal_objective);
        }
      }
      if (empty) {
        done = true;
      } else if (bounded) {
        lo = blo;
        hi = bhi;
        done = true;
      }
    }
    if (!done) {
      throw std::runtime_error("bounding_box: could not bound block '" + b.name + "' up to order " +
                               std::to_string(N0 + 2) + "; supply a box");
    }
  }
  if (!std::isfinite(lo.sum()) || !std::isfinite(hi.sum())) {
    throw std::runtime_error("bounding_box: every block is empty");
  }
  const Eigen::VectorXd pad = 0.05 * (hi - lo) + Eigen::VectorXd::Constant(n, 1e-3);
  return Box(lo - pad, hi + pad);
}

nlohmann::json to_json(const VerifyReport& r) {
  nlohmann::json dirs = nlohmann::json::array();
  for (const auto& d : r.directions) {
    nlohmann::json j = {
        {"direction", std::vector<double>(d.direction.data(), d.direction.data() + d.direction.size())},
        {"lift_status", to_string(d.lift.status)},
        {"oracle", d.oracle.value},
        {"oracle_error_bound", d.oracle.error_bound},
        {"status", d.status}};
    if (d.lift.status == SupportStatus::Finite) {
      j["lift"] = d.lift.value;
      j["lift_exact"] = d.lift.exact;
      j["gap"] = d.gap;
    }
    dirs.push_back(std::move(j));
  }
  return {{"verdict", r.verdict},
          {"tol", r.tol},
          {"margin", r.margin},
          {"seed", r.seed},
          {"max_abs_gap", r.max_abs_gap},
          {"max_gap", r.max_gap},
          {"membership",
           {{"tested", r.membership_tested},
            {"set_in_lift_out", r.set_in_lift_out},
            {"lift_in_set_out", r.lift_in_set_out},
            {"indeterminate", r.membership_indeterminate}}},
          {"directions", dirs}};
}

std::string to_text(const VerifyReport& r) {
  std::ostringstream o;
  int inc = 0;
  for (const auto& d : r.directions) inc += d.status == "inconclusive";
  o << r.verdict << ": " << r.directions.size() << " directions, max |gap| " << r.max_abs_gap
    << " (tol " << r.tol << ")";
  if (inc) o << ", " << inc << " inconclusive";
  o << "\n  membership at margin " << r.margin << ": " << r.membership_tested << " tested, "
    << r.set_in_lift_out << " set-in/lift-out, " << r.lift_in_set_out << " lift-in/set-out, "
    << r.membership_indeterminate << " indeterminate\n";
  return o.str();
}

std::string gap_csv(const VerifyReport& r) {
  std::ostringstream o;
  o.precision(17);
  const int n = r.directions.empty() ? 0 : static_cast<int>(r.directions[0].direction.size());
  o << "index";
  for (int i = 0; i < n; ++i) o << ",l" << (i + 1);
  o << ",lift,oracle,gap,status\n";
  for (size_t k = 0; k < r.directions.size(); ++k) {
    const auto& d = r.directions[k];
    o << k;
    for (int i = 0; i < n; ++i) o << "," << d.direction(i);
    if (d.lift.status == SupportStatus::Finite) {
      o << "," << d.lift.value << "," << d.oracle.value << "," << d.gap;
    } else {
      o << "," << to_string(d.lift.status) << "," << d.oracle.value << ",";
    }
    o << "," << d.status << "\n";
  }
  return o.str();
}

}  // namespace lmirep
