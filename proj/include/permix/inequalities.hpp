#pragma once

// The Carlen-Lieb-Loss inequality in its functional and permanent forms,
// entropy subadditivity over S_n, and the two-level extremal functions that
// lower-bound the entropy of a function with a large level set.
//
// Two norm conventions appear side by side: the functional form uses the
// uniform-measure L2 norm on Omega, ||f||_2 = (mean f^2)^1/2, while the
// permanent form uses Euclidean column norms |v| = (sum v^2)^1/2 = n^1/2 ||v||_2.
// The factor n!/n^(n/2) in the permanent bound is exactly that conversion.

#include <vector>

#include "permix/group.hpp"
#include "permix/rational.hpp"

namespace permix {

inline constexpr int kPermanentCap = 20;

/// Square matrix with cached Euclidean column norms.
template <typename T>
struct SquareMatrix {
  int n = 0;
  std::vector<T> entries;  // row-major

  const T& at(int r, int c) const { return entries[static_cast<std::size_t>(r * n + c)]; }
};

using RealMatrix = SquareMatrix<double>;
using RationalMatrix = SquareMatrix<Rational>;

struct PermanentInstance {
  RealMatrix matrix;
  std::vector<double> column_norms;

  explicit PermanentInstance(RealMatrix m);
};

/// Ryser's inclusion-exclusion with Gray-code updates, O(2^n n). n <= 20.
double permanent(const RealMatrix& m);
Rational permanent(const RationalMatrix& m);

/// Sum over all n! permutations; oracle for small n (n <= 10).
double permanent_brute_force(const RealMatrix& m);
Rational permanent_brute_force(const RationalMatrix& m);

struct InequalitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs = mean over S_n of prod_i f_i(pi(i)) = perm(A)/n! with A[j][i] = f_i(j);
/// rhs = prod_i ||f_i||_2 (uniform measure). Requires n nonnegative functions of size n.
InequalitySides cll_check(const std::vector<OmegaFunction>& fs);

/// lhs = |perm(M)|; rhs = n!/n^(n/2) prod_i |v_i| with Euclidean column norms.
InequalitySides hadamard_permanent_check(const PermanentInstance& instance);

/// lhs = S(f); rhs = (1/2) sum_i S(p_i f).
InequalitySides subadditivity_check(const GroupFunction& f);

struct ExtremalEntropy {
  double entropy = 0.0;      // entropy of the two-level extremal function
  double lemma_bound = 0.0;  // low: delta t^2 / beta^2; high: min(delta t / beta, delta t^2 / beta^2)
  double weak_bound = 0.0;   // high only: delta t^2 / beta
};

/// Entropy of g = beta - t on density delta and beta + delta t / (1 - delta) elsewhere.
/// Needs 0 < t <= beta and 0 < delta <= 1/2.
ExtremalEntropy extremal_entropy_low(double beta, double t, double delta);

/// Entropy of g = beta + t on density delta and beta - delta t / (1 - delta) elsewhere.
/// Needs (beta + t) delta <= beta and 0 < delta <= 1/2.
ExtremalEntropy extremal_entropy_high(double beta, double t, double delta);

/// The two-level functions themselves on a grid of size n (delta n must be an integer).
OmegaFunction two_level_low(int n, double beta, double t, double delta);
OmegaFunction two_level_high(int n, double beta, double t, double delta);

}  // namespace permix
