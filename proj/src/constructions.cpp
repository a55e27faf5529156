#include "permix/constructions.hpp"

#include <algorithm>
#include <atomic>
#include <string>

#include "permix/errors.hpp"
#include "permix/parallel.hpp"

namespace permix {

namespace {

void check_points(int n, const std::vector<int>& T) {
  std::vector<char> seen(static_cast<std::size_t>(std::max(n, 0)), 0);
  for (int p : T) {
    if (p < 0 || p >= n) throw DomainError("point " + std::to_string(p + 1) + " of T lies outside Omega");
    if (seen[static_cast<std::size_t>(p)]) throw DomainError("T lists a point twice");
    seen[static_cast<std::size_t>(p)] = 1;
  }
}

BigInt factorial(int k) {
  BigInt f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

template <typename Images>
bool kedlaya_member(const KedlayaParams& p, const std::vector<char>& in_t, const Images& img) {
  if (!in_t[static_cast<std::size_t>(img[static_cast<std::size_t>(p.basepoint)])]) return false;
  for (int i : p.T)
    if (in_t[static_cast<std::size_t>(img[static_cast<std::size_t>(i)])]) return false;
  return true;
}

template <typename Images>
bool surplus_member(const SurplusParams& p, const std::vector<char>& in_t, const Images& img) {
  for (int i : p.T)
    if (in_t[static_cast<std::size_t>(img[static_cast<std::size_t>(i)])]) return true;
  return false;
}

std::vector<char> mask_of(int n, const std::vector<int>& T) {
  std::vector<char> m(static_cast<std::size_t>(n), 0);
  for (int p : T) m[static_cast<std::size_t>(p)] = 1;
  return m;
}

}  // namespace

void KedlayaParams::validate() const {
  check_points(n, T);
  if (basepoint < 0 || basepoint >= n) throw DomainError("basepoint lies outside Omega");
  if (std::find(T.begin(), T.end(), basepoint) != T.end()) throw DomainError("T must not contain the basepoint");
  if (t() < 1) throw DomainError("Kedlaya set needs t >= 1");
  if (2 * t() + 1 > n) throw DomainError("Kedlaya set needs 2t + 1 <= n");
}

KedlayaParams KedlayaParams::standard(int n, int t) {
  KedlayaParams p;
  p.n = n;
  p.basepoint = 0;
  for (int i = 1; i <= t; ++i) p.T.push_back(i);
  return p;
}

void SurplusParams::validate() const {
  check_points(n, T);
  if (t() < 1) throw DomainError("surplus set needs t >= 1");
}

SurplusParams SurplusParams::standard(int n, int t) {
  SurplusParams p;
  p.n = n;
  for (int i = 0; i < t; ++i) p.T.push_back(i);
  return p;
}

bool kedlaya_contains(const KedlayaParams& params, std::span<const int> images) {
  return kedlaya_member(params, mask_of(params.n, params.T), images);
}

bool surplus_contains(const SurplusParams& params, std::span<const int> images) {
  return surplus_member(params, mask_of(params.n, params.T), images);
}

GroupSubset kedlaya_set(SpacePtr space, const KedlayaParams& params) {
  params.validate();
  if (space->n() != params.n) throw DomainError("Kedlaya parameters do not match the group degree");
  const auto in_t = mask_of(params.n, params.T);
  return GroupSubset::from_predicate(space, [&](std::span<const std::uint8_t> img) {
    return kedlaya_member(params, in_t, img);
  });
}

KedlayaDensity kedlaya_density_formula(int n, int t) {
  if (t < 1 || 2 * t + 1 > n) throw DomainError("Kedlaya density needs 1 <= t and 2t + 1 <= n");
  KedlayaDensity d;
  d.binomial_form = Rational(BigInt(t) * binomial(n - t, t) * factorial(t) * factorial(n - t - 1)) /
                    Rational(factorial(n));
  d.factorial_form = Rational(BigInt(t) * factorial(n - t) * factorial(n - t - 1)) /
                     Rational(factorial(n) * factorial(n - 2 * t));
  d.value = to_double(d.binomial_form);
  return d;
}

GroupSubset surplus_set(SpacePtr space, const SurplusParams& params) {
  params.validate();
  if (space->n() != params.n) throw DomainError("surplus parameters do not match the group degree");
  const auto in_t = mask_of(params.n, params.T);
  return GroupSubset::from_predicate(space, [&](std::span<const std::uint8_t> img) {
    return surplus_member(params, in_t, img);
  });
}

Rational surplus_density_formula(int n, int t) {
  if (t < 1 || t > n) throw DomainError("surplus density needs 1 <= t <= n");
  if (2 * t > n) return Rational(1);
  const BigInt avoid = factorial(n - t) * factorial(n - t);
  return Rational(1) - Rational(avoid) / Rational(factorial(n) * factorial(n - 2 * t));
}

std::uint64_t count_solutions(const GroupSubset& x, const GroupSubset& y, const GroupSubset& z) {
  const GroupSpace& G = x.space();
  if (!G.same_as(y.space()) || !G.same_as(z.space())) throw DomainError("count_solutions: subsets of different groups");
  const auto xs = x.members();
  const auto ys = y.members();
  const auto n = static_cast<std::size_t>(G.n());
  std::atomic<std::uint64_t> total{0};
  parallel_blocks(xs.size(), [&](std::size_t begin, std::size_t end) {
    std::uint64_t local = 0;
    std::uint8_t buf[kMaxEnumeratedN];
    for (std::size_t a = begin; a < end; ++a) {
      auto xi = G.images(xs[a]);
      for (std::size_t b : ys) {
        auto yi = G.images(b);
        for (std::size_t i = 0; i < n; ++i) buf[i] = xi[yi[i]];
        local += z.contains(G.rank_unchecked({buf, n}));
      }
    }
    total += local;
  });
  return total.load();
}

SurplusRatio surplus_ratio(SpacePtr space, const SurplusParams& params) {
  const auto x = surplus_set(space, params);
  if (x.size() == 0) throw DomainError("surplus set is empty; excess undefined");
  SurplusRatio out;
  const BigInt order = static_cast<std::int64_t>(space->order());
  const BigInt size = static_cast<std::int64_t>(x.size());
  out.density = Rational(size) / Rational(order);
  out.solutions = count_solutions(x, x, x);
  // N / (alpha^3 |G|^2) = N |G| / |X|^3
  out.excess = Rational(BigInt(out.solutions) * order) / Rational(size * size * size);
  return out;
}

}  // namespace permix
