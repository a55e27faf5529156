#include <doctest.h>

#include "oracles.hpp"
#include "permix/constructions.hpp"
#include "permix/errors.hpp"
#include "permix/rng.hpp"

using namespace permix;

namespace {

std::vector<bool> bits(const GroupSubset& s) {
  std::vector<bool> b;
  for (std::size_t k = 0; k < s.space().order(); ++k) b.push_back(s.contains(k));
  return b;
}

// direct count over next_permutation
double kedlaya_density_oracle(int n, int t) {
  double count = 0.0;
  for (const auto& p : oracle::group(n, false)) {
    std::vector<int> T;
    for (int k = 1; k <= t; ++k) T.push_back(k);
    count += oracle::kedlaya(p, T, 0);
  }
  return count / oracle::factorial(n);
}

}  // namespace

TEST_CASE("Kedlaya closed forms") {
  CHECK(kedlaya_density_formula(5, 1).binomial_form == Rational(1, 5));
  CHECK(kedlaya_density_formula(6, 2).binomial_form == Rational(1, 5));
  for (int n = 3; n <= 14; ++n) {
    for (int t = 1; 2 * t + 1 <= n; ++t) {
      const auto d = kedlaya_density_formula(n, t);
      CHECK(d.binomial_form == d.factorial_form);
      CHECK(d.value == doctest::Approx(to_double(d.binomial_form)));
    }
  }
  CHECK_THROWS_AS(kedlaya_density_formula(4, 2), DomainError);
  CHECK_THROWS_AS(kedlaya_density_formula(4, 0), DomainError);
}

TEST_CASE("Kedlaya density by enumeration") {
  for (int n = 3; n <= 7; ++n) {
    for (int t = 1; 2 * t + 1 <= n; ++t) {
      const auto p = KedlayaParams::standard(n, t);
      const auto formula = kedlaya_density_formula(n, t).binomial_form;
      const auto s = kedlaya_set(enumerate_group(n, Parity::all), p);
      CHECK(Rational(BigInt(s.size()), BigInt(s.space().order())) == formula);
      CHECK(s.density() == doctest::Approx(kedlaya_density_oracle(n, t)).epsilon(1e-12));
      if (n - t - 1 >= 2) {
        const auto a = kedlaya_set(enumerate_group(n, Parity::even), p);
        CHECK(Rational(BigInt(a.size()), BigInt(a.space().order())) == formula);
      }
    }
  }
}

TEST_CASE("Kedlaya sets are product-free") {
  Rng rng(8);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 5 + trial % 2;
    const int t = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>((n - 1) / 2)));
    // random T and basepoint
    std::vector<int> pts(static_cast<std::size_t>(n));
    std::iota(pts.begin(), pts.end(), 0);
    for (int k = n - 1; k > 0; --k) std::swap(pts[static_cast<std::size_t>(k)], pts[rng.below(static_cast<std::uint64_t>(k + 1))]);
    KedlayaParams p;
    p.n = n;
    p.T.assign(pts.begin(), pts.begin() + t);
    std::sort(p.T.begin(), p.T.end());
    p.basepoint = pts[static_cast<std::size_t>(t)];
    const auto s = kedlaya_set(enumerate_group(n, Parity::all), p);
    const auto b = bits(s);
    CHECK(oracle::count_solutions(oracle::group(n, false), b, b, b) == 0);
    CHECK(count_solutions(s, s, s) == 0);
  }
}

TEST_CASE("Kedlaya parameter validation") {
  KedlayaParams p{5, {1, 2}, 1};
  CHECK_THROWS_AS(p.validate(), DomainError);  // basepoint in T
  p = KedlayaParams{5, {1, 2, 3}, 0};
  CHECK_THROWS_AS(p.validate(), DomainError);  // 2t + 1 > n
  p = KedlayaParams{5, {1, 7}, 0};
  CHECK_THROWS_AS(p.validate(), DomainError);
  CHECK_NOTHROW(KedlayaParams::standard(7, 3).validate());
}

TEST_CASE("membership against the oracle") {
  const auto p = KedlayaParams::standard(6, 2);
  const auto q = SurplusParams::standard(6, 2);
  for (const auto& g : oracle::group(6, false)) {
    CHECK(kedlaya_contains(p, g) == oracle::kedlaya(g, p.T, p.basepoint));
    CHECK(surplus_contains(q, g) == oracle::surplus(g, q.T));
  }
}

TEST_CASE("surplus density formula") {
  CHECK(surplus_density_formula(6, 4) == 1);
  for (int n = 2; n <= 7; ++n) {
    for (int t = 1; t <= n; ++t) {
      const auto s = surplus_set(enumerate_group(n, Parity::all), SurplusParams::standard(n, t));
      CHECK(Rational(BigInt(s.size()), BigInt(s.space().order())) == surplus_density_formula(n, t));
    }
  }
}

TEST_CASE("surplus excess by exhaustive counting") {
  for (int n : {5, 6}) {
    auto space = enumerate_group(n, Parity::even);
    const auto ref = oracle::group(n, true);
    for (int t : {1, 2}) {
      const auto sr = surplus_ratio(space, SurplusParams::standard(n, t));
      const auto b = bits(surplus_set(space, SurplusParams::standard(n, t)));
      const auto count = oracle::count_solutions(ref, b, b, b);
      CHECK(sr.solutions == count);
      const Rational a = sr.density;
      const BigInt order(space->order());
      CHECK(sr.excess == Rational(BigInt(count)) / (a * a * a * order * order));
      CHECK(sr.excess > 1);
    }
  }
}

TEST_CASE("count_solutions against the oracle") {
  auto space = enumerate_group(5, Parity::all);
  const auto x = random_subset(space, 0.2, 1);
  const auto y = random_subset(space, 0.5, 2);
  const auto z = random_subset(space, 0.3, 3);
  CHECK(count_solutions(x, y, z) == oracle::count_solutions(oracle::group(5, false), bits(x), bits(y), bits(z)));
}
