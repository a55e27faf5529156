#include "permix/inequalities.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "permix/errors.hpp"

namespace permix {

PermanentInstance::PermanentInstance(RealMatrix m) : matrix(std::move(m)) {
  if (matrix.n < 1 || matrix.entries.size() != static_cast<std::size_t>(matrix.n * matrix.n)) {
    throw DomainError("permanent instance must be a nonempty square matrix");
  }
  column_norms.assign(static_cast<std::size_t>(matrix.n), 0.0);
  for (int c = 0; c < matrix.n; ++c) {
    double s = 0.0;
    for (int r = 0; r < matrix.n; ++r) s += matrix.at(r, c) * matrix.at(r, c);
    column_norms[static_cast<std::size_t>(c)] = std::sqrt(s);
  }
}

namespace {

template <typename T>
void check_square(const SquareMatrix<T>& m, int cap) {
  if (m.n < 1 || m.entries.size() != static_cast<std::size_t>(m.n * m.n)) throw DomainError("permanent needs a nonempty square matrix");
  if (m.n > cap) throw SizeError("permanent of a " + std::to_string(m.n) + "x" + std::to_string(m.n) + " matrix exceeds the cap n <= " + std::to_string(cap));
}

template <typename T>
T ryser(const SquareMatrix<T>& m) {
  check_square(m, kPermanentCap);
  const int n = m.n;
  std::vector<T> row_sums(static_cast<std::size_t>(n), T(0));
  T total(0);
  std::uint64_t gray = 0;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < subsets; ++k) {
    const int col = std::countr_zero(k);
    const std::uint64_t bit = std::uint64_t{1} << col;
    gray ^= bit;
    const bool added = (gray & bit) != 0;
    for (int r = 0; r < n; ++r) {
      if (added) {
        row_sums[static_cast<std::size_t>(r)] += m.at(r, col);
      } else {
        row_sums[static_cast<std::size_t>(r)] -= m.at(r, col);
      }
    }
    T prod(1);
    for (const auto& s : row_sums) prod *= s;
    // (-1)^(n - |S|)
    if (((n - std::popcount(gray)) & 1) == 0) {
      total += prod;
    } else {
      total -= prod;
    }
  }
  return total;
}

template <typename T>
T brute_force(const SquareMatrix<T>& m) {
  check_square(m, 10);
  const int n = m.n;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  T total(0);
  do {
    T prod(1);
    for (int r = 0; r < n; ++r) prod *= m.at(r, perm[static_cast<std::size_t>(r)]);
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

double l2_uniform(const OmegaFunction& u) { return std::sqrt(inner_product(u, u)); }

}  // namespace

double permanent(const RealMatrix& m) { return ryser(m); }
Rational permanent(const RationalMatrix& m) { return ryser(m); }
double permanent_brute_force(const RealMatrix& m) { return brute_force(m); }
Rational permanent_brute_force(const RationalMatrix& m) { return brute_force(m); }

InequalitySides cll_check(const std::vector<OmegaFunction>& fs) {
  const int n = static_cast<int>(fs.size());
  if (n < 1) throw DomainError("CLL check needs at least one function");
  if (n > kPermanentCap) throw SizeError("CLL check exceeds the permanent cap n <= 20");
  RealMatrix a;
  a.n = n;
  a.entries.assign(static_cast<std::size_t>(n * n), 0.0);
  InequalitySides out;
  out.rhs = 1.0;
  for (int i = 0; i < n; ++i) {
    const auto& f = fs[static_cast<std::size_t>(i)];
    if (f.n() != n) throw DomainError("CLL check needs n functions on a ground set of size n");
    for (int j = 0; j < n; ++j) {
      const double v = f[static_cast<std::size_t>(j)];
      if (v < 0.0) throw DomainError("CLL check needs nonnegative functions");
      a.entries[static_cast<std::size_t>(j * n + i)] = v;
    }
    out.rhs *= l2_uniform(f);
  }
  out.lhs = permanent(a) / factorial(n);
  return out;
}

InequalitySides hadamard_permanent_check(const PermanentInstance& instance) {
  const int n = instance.matrix.n;
  InequalitySides out;
  out.lhs = std::abs(permanent(instance.matrix));
  double log_bound = std::lgamma(n + 1.0) - 0.5 * n * std::log(static_cast<double>(n));
  bool zero = false;
  for (double c : instance.column_norms) {
    if (c == 0.0) zero = true;
    else log_bound += std::log(c);
  }
  out.rhs = zero ? 0.0 : std::exp(log_bound);
  return out;
}

InequalitySides subadditivity_check(const GroupFunction& f) {
  InequalitySides out;
  out.lhs = entropy(f);
  double sum = 0.0;
  for (int i = 0; i < f.space().n(); ++i) sum += entropy(pushforward(f, i));
  out.rhs = 0.5 * sum;
  return out;
}

ExtremalEntropy extremal_entropy_low(double beta, double t, double delta) {
  if (!(t > 0.0 && t <= beta)) throw DomainError("extremal_entropy_low needs 0 < t <= beta");
  if (!(delta > 0.0 && delta <= 0.5)) throw DomainError("extremal_entropy_low needs 0 < delta <= 1/2");
  const double x = t / beta;
  const double y = delta / (1.0 - delta) * x;
  ExtremalEntropy out;
  out.entropy = delta * xlogx(1.0 - x) + (1.0 - delta) * xlogx(1.0 + y);
  out.lemma_bound = delta * x * x;
  return out;
}

ExtremalEntropy extremal_entropy_high(double beta, double t, double delta) {
  if (!(beta > 0.0 && t > 0.0)) throw DomainError("extremal_entropy_high needs beta > 0 and t > 0");
  if (!(delta > 0.0 && delta <= 0.5)) throw DomainError("extremal_entropy_high needs 0 < delta <= 1/2");
  if ((beta + t) * delta > beta) throw DomainError("extremal_entropy_high needs (beta + t) delta <= beta");
  const double x = t / beta;
  const double y = std::min(1.0, delta / (1.0 - delta) * x);
  ExtremalEntropy out;
  out.entropy = delta * xlogx(1.0 + x) + (1.0 - delta) * xlogx(1.0 - y);
  out.lemma_bound = std::min(delta * x, delta * x * x);
  out.weak_bound = delta * t * t / beta;
  return out;
}

namespace {

OmegaFunction two_level(int n, double delta, double on_set, double off_set) {
  const double m = delta * n;
  const auto count = static_cast<int>(std::lround(m));
  if (std::abs(m - count) > 1e-9) throw DomainError("two-level function needs delta n to be an integer");
  std::vector<double> v(static_cast<std::size_t>(n), off_set);
  for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = on_set;
  return OmegaFunction(std::move(v));
}

}  // namespace

OmegaFunction two_level_low(int n, double beta, double t, double delta) {
  return two_level(n, delta, beta - t, beta + delta / (1.0 - delta) * t);
}

OmegaFunction two_level_high(int n, double beta, double t, double delta) {
  return two_level(n, delta, beta + t, std::max(0.0, beta - delta / (1.0 - delta) * t));
}

}  // namespace permix
