#include "lmirep/sampling.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lmirep {

Box::Box(Eigen::VectorXd l, Eigen::VectorXd h) : lo(std::move(l)), hi(std::move(h)) {
  if (lo.size() != hi.size()) throw std::invalid_argument("Box: bound sizes differ");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(lo(i) < hi(i))) throw std::invalid_argument("Box: empty side");
  }
}

Box Box::cube(int n, double r) {
  return Box(Eigen::VectorXd::Constant(n, -r), Eigen::VectorXd::Constant(n, r));
}

bool Box::contains(const Eigen::VectorXd& x, double tol) const {
  return ((x - lo).array() >= -tol).all() && ((hi - x).array() >= -tol).all();
}

double Box::exit_time(const Eigen::VectorXd& p, const Eigen::VectorXd& d) const {
  double t = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (d(i) > 0) t = std::min(t, (hi(i) - p(i)) / d(i));
    if (d(i) < 0) t = std::min(t, (lo(i) - p(i)) / d(i));
  }
  return std::max(t, 0.0);
}

Eigen::VectorXd uniform_direction(Rng& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  do {
    for (int i = 0; i < n; ++i) v(i) = g(rng);
  } while (v.norm() < 1e-12);
  return v.normalized();
}

Eigen::VectorXd uniform_in_box(Rng& rng, const Box& b) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd x(b.dim());
  for (int i = 0; i < b.dim(); ++i) x(i) = b.lo(i) + u(rng) * (b.hi(i) - b.lo(i));
  return x;
}

Eigen::VectorXd uniform_in_ball(Rng& rng, const Eigen::VectorXd& center, double radius) {
  const int n = static_cast<int>(center.size());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::pow(u(rng), 1.0 / n);
  return center + r * uniform_direction(rng, n);
}

std::vector<Eigen::VectorXd> probe_directions(int n, int count, uint64_t seed, bool include_axes) {
  std::vector<Eigen::VectorXd> out;
  if (include_axes) {
    for (int i = 0; i < n && static_cast<int>(out.size()) < count; ++i) {
      for (double s : {1.0, -1.0}) {
        if (static_cast<int>(out.size()) == count) break;
        out.push_back(s * Eigen::VectorXd::Unit(n, i));
      }
    }
  }
  Rng rng(seed);
  while (static_cast<int>(out.size()) < count) out.push_back(uniform_direction(rng, n));
  return out;
}

std::vector<Eigen::VectorXd> cube_grid(int n, int per_axis, int max_axes) {
  const int axes = std::min(n, max_axes);
  std::vector<Eigen::VectorXd> out;
  std::vector<int> idx(static_cast<size_t>(axes), 0);
  while (true) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    for (int a = 0; a < axes; ++a) {
      p(a) = per_axis == 1 ? 0.0 : -1.0 + 2.0 * idx[static_cast<size_t>(a)] / (per_axis - 1);
    }
    out.push_back(p);
    int a = 0;
    while (a < axes && ++idx[static_cast<size_t>(a)] == per_axis) idx[static_cast<size_t>(a++)] = 0;
    if (a == axes) break;
  }
  return out;
}

}  // namespace lmirep
