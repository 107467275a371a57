#pragma once

// Axis-aligned boxes and seeded samplers shared by the probing modules.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace lmirep {

using Rng = std::mt19937_64;

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Box() = default;
  Box(Eigen::VectorXd l, Eigen::VectorXd h);
  /// [-r, r]^n.
  static Box cube(int n, double r);

  int dim() const { return static_cast<int>(lo.size()); }
  double diameter() const { return (hi - lo).norm(); }
  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
  /// Largest t >= 0 with p + t d still in the box (p inside).
  double exit_time(const Eigen::VectorXd& p, const Eigen::VectorXd& d) const;
};

Eigen::VectorXd uniform_direction(Rng& rng, int n);
Eigen::VectorXd uniform_in_box(Rng& rng, const Box& b);
Eigen::VectorXd uniform_in_ball(Rng& rng, const Eigen::VectorXd& center, double radius);

/// `count` seeded unit directions; when include_axes is set the list starts
/// with +e_1, -e_1, +e_2, ... (truncated to count).
std::vector<Eigen::VectorXd> probe_directions(int n, int count, uint64_t seed,
                                              bool include_axes = false);

/// Regular grid with `per_axis` points on each of the first min(n, max_axes)
/// axes of [-1, 1]^n; remaining coordinates are 0.
std::vector<Eigen::VectorXd> cube_grid(int n, int per_axis, int max_axes);

}  // namespace lmirep
