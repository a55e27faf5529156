#pragma once

// Permutations, enumerated symmetric/alternating groups, and the
// uniform-measure calculus on G and on the ground set Omega = {0..n-1}.
//
// Conventions: permutations act on the left and compose as functions,
// (x*y)(i) = x(y(i)). Indices are 0-based; only the CLI prints 1-based points.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "permix/rng.hpp"

namespace permix {

enum class Parity { all, even };

class Permutation {
 public:
  Permutation() = default;
  /// Throws DomainError unless images is a bijection of {0..n-1}.
  explicit Permutation(std::vector<int> images);

  static Permutation identity(int n);

  int size() const { return static_cast<int>(images_.size()); }
  int operator()(int i) const { return images_[static_cast<std::size_t>(i)]; }
  std::span<const int> images() const { return images_; }

  Permutation inverse() const;
  /// Function composition: (*this * rhs)(i) = (*this)(rhs(i)).
  Permutation operator*(const Permutation& rhs) const;

  int sign() const;
  bool is_even() const { return sign() == 1; }
  int fixed_points() const;

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<int> images_;
};

/// Parity of an image array by cycle counting; 0 for even, 1 for odd.
int parity_of(std::span<const int> images);

struct EnumerationCaps {
  int symmetric = 10;
  int alternating = 11;
};

/// Hard limit on enumerated n (elements are stored as bytes with a 16-bit used-mask).
inline constexpr int kMaxEnumeratedN = 12;

/// S_n or A_n with every element materialized in lexicographic order of the
/// image array. A_n is the even subsequence of the S_n order, so the A_n rank
/// of an even permutation is its S_n rank divided by two.
class GroupSpace {
 public:
  GroupSpace(int n, Parity parity);

  int n() const { return n_; }
  Parity parity() const { return parity_; }
  std::size_t order() const { return order_; }
  std::string name() const;

  std::span<const std::uint8_t> images(std::size_t rank) const {
    return {elements_.data() + rank * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }
  Permutation element(std::size_t rank) const;

  /// Rank of a member. Throws DomainError if the permutation is not in the space.
  std::size_t rank(std::span<const std::uint8_t> images) const;
  std::size_t rank(const Permutation& p) const;
  /// Rank without membership checks; images must be a member of the space.
  std::size_t rank_unchecked(std::span<const std::uint8_t> images) const;

  /// Rank of element(a) * element(b).
  std::size_t compose(std::size_t a, std::size_t b) const;
  std::size_t inverse(std::size_t a) const;

  bool same_as(const GroupSpace& other) const {
    return n_ == other.n_ && parity_ == other.parity_;
  }

 private:
  int n_;
  Parity parity_;
  std::size_t order_;
  std::vector<std::uint8_t> elements_;
  std::vector<std::size_t> factorial_;
};

using SpacePtr = std::shared_ptr<const GroupSpace>;

/// Enumerates S_n (Parity::all) or A_n (Parity::even).
/// Throws SizeError naming the cap when n exceeds it.
SpacePtr enumerate_group(int n, Parity parity, EnumerationCaps caps = {});

class GroupSubset;

/// Dense real function on an enumerated group, indexed by rank.
class GroupFunction {
 public:
  GroupFunction(SpacePtr space, std::vector<double> values);

  static GroupFunction constant(SpacePtr space, double c);
  static GroupFunction indicator(const GroupSubset& subset);
  static GroupFunction point_mass(SpacePtr space, std::size_t rank);

  const GroupSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t rank) const { return values_[rank]; }
  std::size_t size() const { return values_.size(); }

  /// Pointwise f - c.
  GroupFunction minus(double c) const;

 private:
  SpacePtr space_;
  std::vector<double> values_;
};

/// Dense real function on Omega = {0..n-1} with the uniform measure.
class OmegaFunction {
 public:
  explicit OmegaFunction(std::vector<double> values);

  static OmegaFunction constant(int n, double c);
  static OmegaFunction indicator(int n, std::span<const int> points);

  int n() const { return static_cast<int>(values_.size()); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  OmegaFunction minus(double c) const;

 private:
  std::vector<double> values_;
};

/// Subset of an enumerated group stored as a bitset over ranks.
class GroupSubset {
 public:
  explicit GroupSubset(SpacePtr space);

  static GroupSubset from_predicate(SpacePtr space,
                                    const std::function<bool(std::span<const std::uint8_t>)>& pred);
  static GroupSubset full(SpacePtr space);

  const GroupSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }

  bool contains(std::size_t rank) const { return (bits_[rank >> 6] >> (rank & 63)) & 1U; }
  void insert(std::size_t rank);
  std::size_t size() const { return count_; }
  double density() const;
  std::vector<std::size_t> members() const;

 private:
  SpacePtr space_;
  std::vector<std::uint64_t> bits_;
  std::size_t count_ = 0;
};

double integral(const GroupFunction& f);
double integral(const OmegaFunction& u);

double inner_product(const GroupFunction& f, const GroupFunction& g);
double inner_product(const OmegaFunction& u, const OmegaFunction& w);

/// (f*g)(x) = mean over y of f(y) g(y^-1 x).
GroupFunction convolve(const GroupFunction& f, const GroupFunction& g);
/// 1_X * 1_Y computed by iterating supports only.
GroupFunction convolve_indicators(const GroupSubset& x, const GroupSubset& y);
/// (f*u)(w) = mean over pi of f(pi) u(pi^-1(w)).
OmegaFunction convolve(const GroupFunction& f, const OmegaFunction& u);

/// p_i f(w) = n * mean over pi of f(pi) 1[pi(i) = w]; preserves the integral.
OmegaFunction pushforward(const GroupFunction& f, int i);

/// S(f) = mean of (f/a) log(f/a), a = mean f, with 0 log 0 = 0.
double entropy(std::span<const double> values);
double entropy(const GroupFunction& f);
double entropy(const OmegaFunction& u);

GroupSubset random_subset(SpacePtr space, double density, std::uint64_t seed);
Permutation random_permutation(const GroupSpace& space, std::uint64_t seed);
/// Uniform element of S_n or A_n without enumeration; A_n by parity rejection.
Permutation random_permutation(int n, Parity parity, Rng& rng);
/// Values drawn uniformly from [0, 1).
GroupFunction random_function(SpacePtr space, Rng& rng);

}  // namespace permix
