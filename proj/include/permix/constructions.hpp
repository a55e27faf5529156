#pragma once

// Two explicit families of subsets of S_n / A_n:
//  * Kedlaya's product-free sets  X = {pi : pi(b) in T, pi(T) disjoint from T}
//  * surplus sets                 X_T = {g : g(T) meets T}
// plus exact counting of solutions to xy = z.

#include <cstdint>
#include <span>
#include <vector>

#include "permix/group.hpp"
#include "permix/rational.hpp"

namespace permix {

struct KedlayaParams {
  int n = 0;
  std::vector<int> T;  // points of Omega, 0-based, sorted
  int basepoint = 0;

  int t() const { return static_cast<int>(T.size()); }
  /// Throws DomainError unless basepoint is outside T, t >= 1 and 2t + 1 <= n.
  void validate() const;
  /// T = {1, ..., t} with basepoint 0 (the points 2..t+1 and 1 in 1-based terms).
  static KedlayaParams standard(int n, int t);
};

struct SurplusParams {
  int n = 0;
  std::vector<int> T;

  int t() const { return static_cast<int>(T.size()); }
  void validate() const;
  /// T = {0, ..., t-1}.
  static SurplusParams standard(int n, int t);
};

bool kedlaya_contains(const KedlayaParams& params, std::span<const int> images);
bool surplus_contains(const SurplusParams& params, std::span<const int> images);

GroupSubset kedlaya_set(SpacePtr space, const KedlayaParams& params);

struct KedlayaDensity {
  Rational binomial_form;   // t C(n-t, t) t! (n-t-1)! / n!
  Rational factorial_form;  // t (n-t)! (n-t-1)! / (n! (n-2t)!)
  double value = 0.0;
};

/// Density of the Kedlaya set inside S_n, exact. Requires 1 <= t and 2t + 1 <= n.
KedlayaDensity kedlaya_density_formula(int n, int t);

GroupSubset surplus_set(SpacePtr space, const SurplusParams& params);

/// Exact density of X_T inside S_n: 1 - (n-t)!^2 / (n! (n-2t)!), or 1 when 2t > n.
Rational surplus_density_formula(int n, int t);

/// #{(x, y) in X x Y : xy in Z}.
std::uint64_t count_solutions(const GroupSubset& x, const GroupSubset& y, const GroupSubset& z);

struct SurplusRatio {
  Rational density;      // |X_T| / |G|
  std::uint64_t solutions = 0;  // N_T
  Rational excess;       // N_T / (alpha^3 |G|^2)
};

/// Throws DomainError when X_T is empty.
SurplusRatio surplus_ratio(SpacePtr space, const SurplusParams& params);

}  // namespace permix
