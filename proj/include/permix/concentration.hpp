#pragma once

// Hoeffding's statistic X = sum_i a[i][pi(i)] for uniform pi: exact
// distributions, the Bernstein-type tail bound and the exponential-moment
// inequalities behind it, plus the dyadic and level-set machinery used to
// study the rearrangement deficit <f*g1, g2> - alpha beta gamma.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "permix/group.hpp"

namespace permix {

class ConcentrationInstance {
 public:
  /// a is row-major n x n. Throws DomainError on a non-square or non-finite input.
  ConcentrationInstance(int n, std::vector<double> a);

  int n() const { return n_; }
  double at(int i, int j) const { return a_[static_cast<std::size_t>(i * n_ + j)]; }
  std::span<const double> entries() const { return a_; }

  double max_abs() const { return max_abs_; }  // M
  double v() const { return v_; }              // (1/n) sum a_ij^2
  bool centered() const { return centered_; }
  /// Constant added back to recover the original statistic: X_orig = X + shift.
  double shift() const { return shift_; }

  /// Statistic for one permutation.
  double statistic(std::span<const std::uint8_t> images) const;
  double statistic(std::span<const int> images) const;

  /// Subtracts each row mean. M at most doubles and v does not increase.
  ConcentrationInstance center() const;

 private:
  int n_;
  std::vector<double> a_;
  double max_abs_ = 0.0;
  double v_ = 0.0;
  bool centered_ = false;
  double shift_ = 0.0;
};

ConcentrationInstance center(const ConcentrationInstance& instance);

/// Random instance with i.i.d. uniform entries in [-1, 1].
ConcentrationInstance random_instance(int n, Rng& rng);

/// Parses the CSV matrix format: a header line holding n, then n rows of n
/// comma-separated values.
ConcentrationInstance parse_instance_csv(const std::string& text);

struct Distribution {
  /// Distinct values (ascending) with the number of permutations attaining them.
  std::vector<std::pair<double, std::uint64_t>> atoms;
  std::uint64_t order = 0;

  double probability(std::size_t k) const { return static_cast<double>(atoms[k].second) / static_cast<double>(order); }
  double mean() const;
  /// P(|X| > t).
  double two_sided_tail(double t) const;
};

/// Exact law of X over uniform pi in the space. Values closer than 1e-12
/// (relative) are merged into one atom.
Distribution hoeffding_exact_distribution(const ConcentrationInstance& instance, const GroupSpace& space);

/// Monte Carlo counts of |X| > t for each threshold t over uniform pi in S_n or
/// A_n. Chunked with derived seeds, so the counts do not depend on the thread count.
std::vector<std::uint64_t> monte_carlo_tail_counts(const ConcentrationInstance& instance, Parity parity,
                                                   std::span<const double> thresholds, std::uint64_t samples,
                                                   std::uint64_t seed);

/// 2 exp(-c t^2 / (v + M t)).
double bernstein_bound(const ConcentrationInstance& instance, double t, double c);

inline constexpr double kDefaultBernsteinConstant = 1.0 / 16.0;

/// Largest c for which the Bernstein bound dominates P(|X| > t) for every t > 0.
/// Infinite for a point mass at 0.
double fitted_bernstein_constant(const ConcentrationInstance& instance, const Distribution& dist);

struct MomentPair {
  double exact = 0.0;
  double bound = 0.0;
};

/// exact = E exp(lambda X) by enumeration; bound = exp(2 lambda^2 v / (1 - 2 lambda M)).
/// Needs 0 < 2 lambda M < 1 and zero row sums.
MomentPair exp_moment_pair(const ConcentrationInstance& instance, double lambda, const GroupSpace& space);

/// lhs = E exp(lambda X) over S_n; rhs = prod_i ((1/n) sum_j exp(2 lambda a_ij))^1/2.
MomentPair cll_exp_moment_step(const ConcentrationInstance& instance, double lambda, const GroupSpace& space);

struct DyadicPiece {
  double scale = 0.0;  // s = +-2^-k
  int k = 0;
  OmegaFunction values;
  double delta = 0.0;  // density of the support
};

inline constexpr double kDefaultDyadicFloor = 1e-15;

/// Splits g - mean(g) into pieces by sign and magnitude band (|s|/2, |s|].
/// Entries of magnitude <= floor are dropped. Pieces are ordered by s
/// descending. g must take values in [0, 1].
std::vector<DyadicPiece> dyadic_decompose(const OmegaFunction& g, double floor = kDefaultDyadicFloor);

struct LevelSetPair {
  OmegaFunction h1;
  OmegaFunction h2;

  /// Throws DomainError unless each h lies in [1/2, 1] on its support and is 0 off it.
  void validate() const;
  double delta1() const;
  double delta2() const;
};

enum class Regime { high, low };

struct LevelSetDeficit {
  double observed = 0.0;  // <f*h1, h2> - alpha int h1 int h2
  Regime regime = Regime::high;
  double alpha = 0.0, delta1 = 0.0, delta2 = 0.0;
  double high_bound = 0.0;            // alpha (d1 d2)^1/2 log n / n^1/2
  double low_upper_log = 0.0;         // alpha log n / n
  double low_upper_density = 0.0;     // d1 d2
  double low_lower = 0.0;             // -alpha d1 d2
  double cauchy_schwarz_cap = 0.0;    // ||h1|| ||h2||
  double std_error = 0.0;             // Monte Carlo only
};

/// Exact evaluation over the enumerated group of f.
LevelSetDeficit levelset_deficit(const GroupFunction& f, const LevelSetPair& pair);

/// Monte Carlo over uniform pi in S_n / A_n for large n; f maps a permutation
/// into [0, 1].
LevelSetDeficit levelset_deficit_monte_carlo(const std::function<double(std::span<const int>)>& f, Parity parity,
                                             const LevelSetPair& pair, std::uint64_t samples, std::uint64_t seed);

struct DeficitReport {
  int n = 0;
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  double deficit = 0.0;        // -(<f*g1, g2> - alpha beta gamma)
  double variance_term = 0.0;  // alpha ||g1 - beta|| ||g2 - gamma|| log n / n^1/2
  double entropy_term = 0.0;   // (abg)^1/2 (b^1/2 + g^1/2) (S1 S2)^1/2 (log n)^5/2 / n^1/2
  double ratio = 0.0;          // deficit / (variance_term + entropy_term)
};

/// f, g1, g2 must take values in [0, 1]. The additive n^-99 term is omitted.
DeficitReport rearrangement_deficit_report(const GroupFunction& f, const OmegaFunction& g1,
                                           const OmegaFunction& g2);

}  // namespace permix
