#include "lmirep/localize.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lmirep/local_opt.h"

namespace lmirep {

const char* to_string(CoverMode m) { return m == CoverMode::Convex ? "convex" : "hull"; }

namespace {

double coef_scale(const Polynomial& h) { return std::max(1.0, h.max_abs_coefficient()); }

bool strictly_inside(const BasicSet& b, const Eigen::VectorXd& x) {
  if (!b.equalities.empty()) return false;
  for (const auto& h : b.inequalities) {
    if (!(h.eval(x) > 1e-9 * coef_scale(h))) return false;
  }
  return true;
}

bool nonneg_on(const BasicSet& b, const std::vector<int>& idx, const Eigen::VectorXd& x) {
  for (int i : idx) {
    if (b.inequalities[static_cast<size_t>(i)].eval(x) < 0) return false;
  }
  return true;
}

// Newton projection onto {h = 0} along the gradient.
std::optional<Eigen::VectorXd> project_to_zero_set(const Polynomial& h, Eigen::VectorXd x) {
  const double s = coef_scale(h);
  for (int it = 0; it < 30; ++it) {
    const double v = h.eval(x);
    if (std::abs(v) <= 1e-12 * s) return x;
    const Eigen::VectorXd g = h.eval_gradient(x);
    const double gg = g.squaredNorm();
    if (gg < 1e-24) return std::nullopt;
    x -= v / gg * g;
  }
  if (std::abs(h.eval(x)) <= 1e-9 * s) return x;
  return std::nullopt;
}

struct PatchAttempt {
  bool ok = true;
  std::string reason;
  std::vector<PatchPiece> pieces;
};

PatchAttempt make_pieces(const UnionSet& s, const Eigen::VectorXd& u, double delta, bool fixed,
                         const CoverOptions& opts, Rng& rng) {
  const int n = s.n;
  PatchAttempt out;
  std::vector<Eigen::VectorXd> samples;
  samples.reserve(static_cast<size_t>(opts.check_samples));
  for (int k = 0; k < opts.check_samples; ++k) samples.push_back(uniform_in_ball(rng, u, delta));
  const Polynomial ball = BallConstraint(u, delta).polynomial();

  for (size_t b = 0; b < s.blocks.size(); ++b) {
    const BasicSet& blk = s.blocks[b];
    PatchPiece piece;
    piece.block = static_cast<int>(b);
    if (membership(blk, u, opts.active_tol)) {
      for (size_t j = 0; j < blk.inequalities.size(); ++j) {
        const auto& h = blk.inequalities[j];
        if (std::abs(h.eval(u)) <= opts.active_tol * coef_scale(h)) piece.active.push_back(static_cast<int>(j));
      }
      piece.kept = piece.active;
      for (size_t j = 0; j < blk.inequalities.size(); ++j) {
        const int jj = static_cast<int>(j);
        if (std::find(piece.active.begin(), piece.active.end(), jj) != piece.active.end()) continue;
        const auto& h = blk.inequalities[j];
        bool positive = true;
        for (const auto& x : samples) {
          if (nonneg_on(blk, piece.active, x) && h.eval(x) <= 0) {
            positive = false;
            break;
          }
        }
        if (positive) continue;
        if (!fixed) {
          out.ok = false;
          out.reason = "constraint " + std::to_string(j) + " of block " + std::to_string(b) +
                       " changes sign on the ball";
          return out;
        }
        piece.kept.push_back(jj);
      }
    } else {
      bool touches = false;
      for (const auto& x : samples) {
        if (membership(blk, x, 0.0)) {
          touches = true;
          break;
        }
      }
      if (!touches) continue;
      if (!fixed) {
        out.ok = false;
        out.reason = "block " + std::to_string(b) + " enters the ball without containing the center";
        return out;
      }
      for (size_t j = 0; j < blk.inequalities.size(); ++j) piece.kept.push_back(static_cast<int>(j));
    }
    std::vector<Polynomial> ineqs;
    for (int j : piece.kept) ineqs.push_back(blk.inequalities[static_cast<size_t>(j)]);
    ineqs.push_back(ball);
    piece.set = BasicSet(n, ineqs, blk.equalities, blk.name);

    if (opts.require_strict_qc) {
      for (int j : piece.active) {
        const Polynomial& h = blk.inequalities[static_cast<size_t>(j)];
        for (const auto& x0 : samples) {
          const auto x = project_to_zero_set(h, x0);
          if (!x || (*x - u).norm() > delta || !membership(piece.set, *x, 1e-9)) continue;
          if (!check_quasi_concave_at(h, *x, opts.certify).strictly_quasi_concave) {
            out.ok = false;
            out.reason = "constraint " + std::to_string(j) + " of block " + std::to_string(b) +
                         " is not strictly quasi-concave on the ball";
            return out;
          }
        }
      }
    }
    out.pieces.push_back(std::move(piece));
  }
  if (out.pieces.empty()) {
    out.ok = false;
    out.reason = "the ball does not meet the set";
  }
  return out;
}

std::string point_text(const Eigen::VectorXd& u) {
  std::ostringstream o;
  o << "(";
  for (Eigen::Index i = 0; i < u.size(); ++i) o << (i ? ", " : "") << u(i);
  o << ")";
  return o.str();
}

}  // namespace

double local_feature_scale(const UnionSet& s, const Eigen::VectorXd& u) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& blk : s.blocks) {
    const bool inside = membership(blk, u, kDefaultActiveTol);
    for (const auto& h : blk.inequalities) {
      const double v = h.eval(u);
      const double g = h.eval_gradient(u).norm();
      if (g <= 0) continue;
      if (inside && v > kDefaultActiveTol * coef_scale(h)) best = std::min(best, v / g);
      if (!inside && v < 0) best = std::min(best, -v / g);
    }
  }
  return best;
}

std::vector<Eigen::VectorXd> farthest_points(const std::vector<Eigen::VectorXd>& points, int k) {
  std::vector<Eigen::VectorXd> out;
  if (points.empty() || k <= 0) return out;
  std::vector<double> dist(points.size(), std::numeric_limits<double>::infinity());
  size_t next = 0;
  while (static_cast<int>(out.size()) < k && out.size() < points.size()) {
    out.push_back(points[next]);
    double far = -1.0;
    for (size_t i = 0; i < points.size(); ++i) {
      dist[i] = std::min(dist[i], (points[i] - points[next]).norm());
    }
    size_t arg = 0;
    for (size_t i = 0; i < points.size(); ++i) {
      if (dist[i] > far) {
        far = dist[i];
        arg = i;
      }
    }
    if (far <= 0) break;
    next = arg;
  }
  return out;
}

std::vector<Eigen::VectorXd> convex_boundary_candidates(const UnionSet& s, const Box& box, int count,
                                                        uint64_t seed) {
  s.validate();
  const int n = s.n;
  const int res = n <= 2 ? 41 : 15;
  std::vector<std::vector<Eigen::VectorXd>> members(s.blocks.size());
  {
    const Eigen::VectorXd mid = 0.5 * (box.lo + box.hi);
    const Eigen::VectorXd half = 0.5 * (box.hi - box.lo);
    for (const auto& g : cube_grid(n, res, 3)) {
      const Eigen::VectorXd x = mid + half.cwiseProduct(g);
      for (size_t b = 0; b < s.blocks.size(); ++b) {
        if (membership(s.blocks[b], x, 1e-9)) members[b].push_back(x);
      }
    }
  }
  Rng rng(seed ^ 0x5851f42d4c957f2dULL);
  std::vector<Eigen::VectorXd> out;
  for (const auto& l : probe_directions(n, count, seed)) {
    LocalResult best;
    bool have = false;
    for (size_t b = 0; b < s.blocks.size(); ++b) {
      NlpProblem p;
      p.n = n;
      p.objective = Polynomial(n);
      for (int i = 0; i < n; ++i) p.objective.add_term(ExponentVector::unit(n, i), l(i));
      p.inequalities = s.blocks[b].inequalities;
      p.equalities = s.blocks[b].equalities;
      std::vector<Eigen::VectorXd> starts;
      auto& m = members[b];
      if (m.empty()) {
        starts.push_back(0.5 * (box.lo + box.hi));
      } else {
        std::vector<size_t> order(m.size());
        for (size_t i = 0; i < m.size(); ++i) order[i] = i;
        const size_t top = std::min<size_t>(3, m.size());
        std::partial_sort(order.begin(), order.begin() + static_cast<long>(top), order.end(),
                          [&](size_t a, size_t c) { return l.dot(m[a]) < l.dot(m[c]); });
        for (size_t i = 0; i < top; ++i) starts.push_back(m[order[i]]);
        std::uniform_int_distribution<size_t> pick(0, m.size() - 1);
        for (int k = 0; k < 2; ++k) starts.push_back(m[pick(rng)]);
      }
      const LocalResult r = minimize_multistart(p, starts);
      if (!r.converged) continue;
      if (!have || r.value < best.value) {
        best = r;
        have = true;
      }
    }
    if (!have) continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Eigen::VectorXd& q) {
      return (q - best.x).norm() <= 1e-6;
    });
    if (!dup) out.push_back(best.x);
  }
  return out;
}

CoverPlan plan_cover(const UnionSet& s, const Box& box, const CoverOptions& opts) {
  s.validate();
  if (box.dim() != s.n) throw DimensionError("plan_cover: box dimension mismatch");
  if (opts.delta && !(*opts.delta > 0)) throw std::invalid_argument("plan_cover: delta must be positive");
  CoverPlan plan;
  plan.n = s.n;
  plan.mode = opts.mode;
  plan.seed = opts.seed;

  std::vector<Eigen::VectorXd> centers;
  std::vector<Eigen::VectorXd> candidates;
  if (!opts.centers.empty()) {
    plan.provenance = "manual";
    centers = opts.centers;
    for (const auto& c : centers) {
      if (c.size() != s.n) throw DimensionError("plan_cover: center dimension mismatch");
    }
  } else {
    plan.provenance = "auto";
    const int pool = opts.auto_count * opts.candidates_per_center;
    if (opts.mode == CoverMode::Hull) {
      candidates = convex_boundary_candidates(s, box, pool, opts.seed);
    } else {
      for (size_t b = 0; b < s.blocks.size(); ++b) {
        const BasicSet& blk = s.blocks[b];
        if (!blk.equalities.empty() || blk.inequalities.empty()) continue;
        std::vector<BoundaryPoint> pts;
        try {
          pts = sample_boundary(blk, box, pool, opts.seed + b);
        } catch (const std::runtime_error&) {
          continue;
        }
        for (const auto& bp : pts) {
          bool interior_elsewhere = false;
          for (size_t o = 0; o < s.blocks.size(); ++o) {
            if (o != b && strictly_inside(s.blocks[o], bp.point)) interior_elsewhere = true;
          }
          if (!interior_elsewhere) candidates.push_back(bp.point);
        }
      }
    }
    if (candidates.empty()) throw CoverError("plan_cover: no boundary candidates found in the box");
    centers = farthest_points(candidates, opts.auto_count);
  }

  Rng rng(opts.seed * 0x2545f4914f6cdd1dULL + 7);
  const double half_side = 0.5 * (box.hi - box.lo).minCoeff();
  auto make_patch = [&](const Eigen::VectorXd& u) {
    CoverPatch patch;
    patch.center = u;
    if (opts.delta) {
      patch.delta = *opts.delta;
      PatchAttempt a = make_pieces(s, u, patch.delta, true, opts, rng);
      if (!a.ok) throw CoverError("plan_cover: at " + point_text(u) + ": " + a.reason);
      patch.pieces = std::move(a.pieces);
      return patch;
    }
    double delta = std::max(opts.delta_floor, 0.5 * std::min(local_feature_scale(s, u), half_side));
    std::string last;
    for (int h = 0; h <= opts.max_halvings && delta >= opts.delta_floor; ++h, delta *= 0.5) {
      PatchAttempt a = make_pieces(s, u, delta, false, opts, rng);
      if (a.ok) {
        patch.delta = delta;
        patch.pieces = std::move(a.pieces);
        return patch;
      }
      last = a.reason;
    }
    throw CoverError("plan_cover: no admissible radius above the floor at " + point_text(u) + ": " + last);
  };
  for (const auto& u : centers) plan.patches.push_back(make_patch(u));

  if (opts.complete && !candidates.empty()) {
    auto uncovered_gap = [&](const Eigen::VectorXd& x) {
      double gap = std::numeric_limits<double>::infinity();
      for (const auto& p : plan.patches) gap = std::min(gap, (x - p.center).norm() - 0.9 * p.delta);
      return gap;
    };
    while (static_cast<int>(plan.patches.size()) < opts.max_patches) {
      double worst = 0.0;
      const Eigen::VectorXd* next = nullptr;
      for (const auto& x : candidates) {
        const double g = uncovered_gap(x);
        if (g > worst) {
          worst = g;
          next = &x;
        }
      }
      if (!next) break;
      plan.patches.push_back(make_patch(*next));
    }
    for (const auto& x : candidates) {
      if (uncovered_gap(x) > 0) {
        throw CoverError("plan_cover: boundary candidate " + point_text(x) + " left uncovered after " +
                         std::to_string(opts.max_patches) + " patches");
      }
    }
  }
  return plan;
}

LiftedRepresentation local_patch_lift(const BasicSet& piece, const Eigen::VectorXd& center, double delta, int N,
                                      MomentMode mode) {
  const int n = piece.n;
  auto local = [&](const Polynomial& h) {
    Polynomial z = affine_substitute(h, center, delta);
    const double c = z.max_abs_coefficient();
    if (c > 0) z *= 1.0 / c;
    return z;
  };
  std::vector<Polynomial> ineqs, eqs;
  for (const auto& h : piece.inequalities) ineqs.push_back(local(h));
  for (const auto& f : piece.equalities) eqs.push_back(local(f));
  BasicSet zs(n, ineqs, eqs);
  zs.name = piece.name;
  const LiftedRepresentation rz = build_moment_lmi(zs, N, mode);

  // Variables (x, z, y) with x = center + delta z.
  LiftedRepresentation r(n, n + rz.num_lifted);
  for (const auto& p : rz.pencils) {
    LinearPencil q(p.size, n, r.num_lifted);
    q.A0 = p.A0;
    for (int i = 0; i < n; ++i) q.Bu[static_cast<size_t>(i)] = p.Ax[static_cast<size_t>(i)];
    for (int k = 0; k < rz.num_lifted; ++k) q.Bu[static_cast<size_t>(n + k)] = p.Bu[static_cast<size_t>(k)];
    r.pencils.push_back(std::move(q));
  }
  for (const auto& e : rz.equalities) {
    AffineEquality q;
    q.coeffs = Eigen::VectorXd::Zero(r.num_variables());
    q.coeffs.tail(rz.num_variables()) = e.coeffs;
    q.constant = e.constant;
    r.equalities.push_back(std::move(q));
  }
  for (int i = 0; i < n; ++i) {
    AffineEquality q;
    q.coeffs = Eigen::VectorXd::Zero(r.num_variables());
    q.coeffs(i) = 1.0;
    q.coeffs(n + i) = -delta;
    q.constant = -center(i);
    r.equalities.push_back(std::move(q));
  }
  r.metadata = rz.metadata;
  r.metadata["local_frame"] = {{"center", std::vector<double>(center.data(), center.data() + n)},
                               {"delta", delta}};
  return r;
}

UnionLift build_cover_representation(const CoverPlan& plan, int N, MomentMode mode,
                                     const UnionOptions& union_opts) {
  if (plan.patches.empty()) throw std::invalid_argument("build_cover_representation: empty plan");
  std::vector<LiftedRepresentation> reps;
  for (const auto& patch : plan.patches) {
    for (const auto& piece : patch.pieces) {
      reps.push_back(local_patch_lift(piece.set, patch.center, patch.delta, N, mode));
    }
  }
  UnionLift ul = build_union(reps, union_opts);
  ul.output.metadata["cover"] = to_json(plan);
  ul.output.metadata["order"] = N;
  ul.output.metadata["mode"] = to_string(mode);
  return ul;
}

nlohmann::json to_json(const CoverPlan& plan) {
  nlohmann::json patches = nlohmann::json::array();
  for (const auto& p : plan.patches) {
    nlohmann::json pieces = nlohmann::json::array();
    for (const auto& pc : p.pieces) {
      pieces.push_back({{"block", pc.block}, {"active", pc.active}, {"kept", pc.kept}});
    }
    patches.push_back({{"center", std::vector<double>(p.center.data(), p.center.data() + p.center.size())},
                       {"delta", p.delta},
                       {"pieces", pieces}});
  }
  return {{"mode", to_string(plan.mode)},
          {"provenance", plan.provenance},
          {"seed", plan.seed},
          {"patches", patches}};
}

}  // namespace lmirep
