#pragma once

// Moment relaxations of basic semialgebraic sets.
//
// For T = {f_k = 0, h_j >= 0} and order N the builder emits, for every
// product h^nu = h_1^nu_1 ... h_m^nu_m (nu in {0,1}^m) with
// d_nu = ceil(deg h^nu / 2) <= N, the localizing pencil
//
//   sum_alpha A^nu_alpha y_alpha >= 0,   h^nu(x) v(x) v(x)^T = sum_alpha A^nu_alpha x^alpha,
//
// where v = [x^{N - d_nu}], and for every f_k the row sum_alpha f^k_alpha y_alpha = 0.
// Substituting y_0 = 1 and y_{e_i} = x_i leaves the lifted variables
// u = (y_alpha : 2 <= |alpha| <= 2N) in graded lex order.

#include <map>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "lmirep/polynomial.h"
#include "lmirep/sets.h"

namespace lmirep {

class OrderTooSmall : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Moment index: all alpha with |alpha| <= 2N.
struct MomentBasis {
  int n = 0;
  int N = 0;
  std::vector<ExponentVector> monomials;
  std::map<ExponentVector, int> index;

  MomentBasis(int dim, int order);
  int size() const { return static_cast<int>(monomials.size()); }
  /// Throws std::out_of_range when |alpha| > 2N.
  int position(const ExponentVector& alpha) const;
  /// Number of lifted variables, size() - n - 1.
  int num_lifted() const { return size() - n - 1; }
};

struct PreorderingTerm {
  std::vector<int> nu;
  Polynomial product;
  int offset = 0;  // d_nu
};

enum class MomentMode { Preordering, Module };

const char* to_string(MomentMode m);
MomentMode moment_mode_from_string(const std::string& s);

inline constexpr int kDefaultPreorderingCap = 12;

/// Products h^nu in nu-lex order (nu read as a binary word, h_1 most
/// significant). Preordering mode enumerates all of {0,1}^m, module mode
/// only |nu| <= 1. Terms with d_nu > N are omitted.
std::vector<PreorderingTerm> preordering_terms(const BasicSet& s, int N, MomentMode mode);

using LocalizingMatrices = std::map<ExponentVector, Eigen::MatrixXd>;

/// A^nu_alpha for h over the basis [x^{N - d}] with d = ceil(deg h / 2).
/// Throws OrderTooSmall when d > N.
LocalizingMatrices localizing_matrices(const Polynomial& h, int N);

/// Smallest order accepted by build_moment_lmi: max(1, ceil(deg h_j / 2),
/// ceil(deg f_k / 2)).
int minimum_order(const BasicSet& s);

/// Throws OrderTooSmall, or std::invalid_argument when preordering mode is
/// asked for more than `preordering_cap` inequalities.
LiftedRepresentation build_moment_lmi(const BasicSet& s, int N,
                                      MomentMode mode = MomentMode::Preordering,
                                      int preordering_cap = kDefaultPreorderingCap);

/// Lifted coordinates of the Dirac measure at x: u = (x^alpha)_{2 <= |alpha| <= 2N}.
/// Throws std::invalid_argument when x is not in s (tolerance kDefaultActiveTol).
Eigen::VectorXd point_mass_lift(const BasicSet& s, const Eigen::VectorXd& x, int N);

}  // namespace lmirep
