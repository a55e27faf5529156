#pragma once

// Product-mixing measurements: exact and Monte Carlo estimates of
// <1_X * 1_Y, 1_Z>, the Gowers bound, product-free certification, and the
// sufficiency margins of the one-sided mixing theorem for A_n.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "permix/constructions.hpp"
#include "permix/group.hpp"
#include "permix/rng.hpp"

namespace permix {

enum class Method { exact, monte_carlo };

struct MixingReport {
  double total = 0.0;             // <1_X * 1_Y, 1_Z>
  double main = 0.0;              // alpha beta gamma
  double gowers_bound = 0.0;      // m^-1/2 (alpha beta gamma)^1/2
  double threshold_margin = 0.0;  // min(ab, ag, bg) n / (log n)^7
  Method method = Method::exact;
  double std_error = 0.0;         // 0 for exact
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  int n = 0;
  int m = 0;
  std::uint64_t solutions = 0;    // exact: #solutions; Monte Carlo: product hits
  std::uint64_t samples = 0;      // Monte Carlo only
  double excess = 0.0;            // total / main
  double excess_ci_low = 0.0;     // 95% normal interval, Monte Carlo only
  double excess_ci_high = 0.0;
};

inline constexpr std::uint64_t kDefaultPairBudget = 4'000'000'000ULL;

/// Exact report from count_solutions. Throws BudgetError when |X||Y| exceeds
/// the budget (use mixing_monte_carlo instead).
MixingReport mixing_exact(const GroupSubset& x, const GroupSubset& y, const GroupSubset& z, int m,
                          std::uint64_t pair_budget = kDefaultPairBudget);

/// Membership predicate for a subset of S_n or A_n that need not be enumerated.
struct MembershipOracle {
  std::string name;
  std::function<bool(std::span<const int>)> contains;
  /// Uniform member of the set inside the ambient group (parity respected).
  /// Empty when only rejection from the uniform measure is available.
  std::function<void(Rng&, std::vector<int>&)> sample;
  /// Exact density inside the ambient group, when known.
  std::optional<double> density;
};

MembershipOracle universal_oracle(int n, Parity parity);
MembershipOracle kedlaya_oracle(const KedlayaParams& params, Parity parity);
MembershipOracle surplus_oracle(const SurplusParams& params, Parity parity);
/// Oracle for an enumerated subset; rejection sampling, exact density.
MembershipOracle subset_oracle(const GroupSubset& subset);

/// Samples x from X and y from Y (constructively or by rejection), counts
/// xy in Z, and reports total = alpha beta P(xy in Z). Work is split into
/// fixed-size chunks with derived seeds, so results do not depend on the
/// thread count. Throws DomainError when a rejection sampler sees an
/// acceptance rate below 1e-6.
MixingReport mixing_monte_carlo(const MembershipOracle& x, const MembershipOracle& y,
                                const MembershipOracle& z, int n, Parity parity,
                                std::uint64_t samples, std::uint64_t seed, int m = 0);

struct ProductFreeResult {
  bool product_free = true;
  /// Ranks (x, y, xy) of the first solution found in rank order.
  std::optional<std::array<std::size_t, 3>> witness;
};

ProductFreeResult product_free_check(const GroupSubset& x,
                                     std::uint64_t pair_budget = kDefaultPairBudget);

struct ConditionMargin {
  std::string name;
  double margin = 0.0;      // alpha beta gamma / (error term), constant 1
  double log10_margin = 0.0;
};

struct ThresholdReport {
  std::array<ConditionMargin, 5> conditions;
  double summary = 0.0;  // min(ab, ag, bg) n / (log n)^7
};

/// The five sufficiency ratios; values above 1 mean the error term is
/// smaller than the main term (with all implicit constants set to 1).
ThresholdReport main_theorem_conditions(double alpha, double beta, double gamma, int n);

double threshold_margin(double alpha, double beta, double gamma, int n);

}  // namespace permix
