#include <doctest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "permix/errors.hpp"
#include "permix/group.hpp"
#include "permix/rng.hpp"

using namespace permix;

namespace {

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

oracle::Perm as_perm(std::span<const std::uint8_t> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_CASE("composition is right to left") {
  const Permutation x({1, 2, 0});
  const Permutation y({1, 0, 2});
  const auto xy = x * y;
  // (x*y)(0) = x(y(0)) = x(1) = 2
  CHECK(xy(0) == 2);
  CHECK(xy(1) == 1);
  CHECK(xy(2) == 0);
  CHECK(x * x.inverse() == Permutation::identity(3));
  CHECK(y.sign() == -1);
  CHECK(x.is_even());
  CHECK(Permutation::identity(4).fixed_points() == 4);
}

TEST_CASE("malformed permutations are rejected") {
  CHECK_THROWS_AS(Permutation({0, 0, 1}), DomainError);
  CHECK_THROWS_AS(Permutation({0, 3, 1}), DomainError);
}

TEST_CASE("enumeration is lexicographic and A_n is the even subsequence") {
  for (int n = 1; n <= 6; ++n) {
    for (bool ev : {false, true}) {
      auto space = enumerate_group(n, ev ? Parity::even : Parity::all);
      const auto ref = oracle::group(n, ev);
      REQUIRE(space->order() == ref.size());
      for (std::size_t k = 0; k < ref.size(); ++k) {
        CHECK(as_perm(space->images(k)) == ref[k]);
        CHECK(space->rank(space->images(k)) == k);
      }
    }
  }
  CHECK(enumerate_group(1, Parity::even)->order() == 1);
  CHECK(enumerate_group(2, Parity::even)->order() == 1);
}

TEST_CASE("rank rejects odd permutations in A_n") {
  auto a4 = enumerate_group(4, Parity::even);
  CHECK_THROWS_AS(a4->rank(Permutation({1, 0, 2, 3})), DomainError);
}

TEST_CASE("compose and inverse agree with the oracle") {
  auto space = enumerate_group(5, Parity::all);
  const auto ref = oracle::group(5, false);
  const auto idx = oracle::index(ref);
  for (std::size_t a = 0; a < ref.size(); a += 7) {
    CHECK(space->inverse(a) == idx.at(oracle::inverse(ref[a])));
    for (std::size_t b = 0; b < ref.size(); b += 11) CHECK(space->compose(a, b) == idx.at(oracle::compose(ref[a], ref[b])));
  }
}

TEST_CASE("enumeration caps raise size errors") {
  CHECK_THROWS_AS(enumerate_group(11, Parity::all), SizeError);
  CHECK_THROWS_AS(enumerate_group(12, Parity::even), SizeError);
  CHECK_THROWS_AS(enumerate_group(6, Parity::all, EnumerationCaps{5, 5}), SizeError);
}

TEST_CASE("convolution against the brute-force oracle") {
  Rng rng(11);
  for (auto [n, par] : {std::pair{3, Parity::all}, std::pair{4, Parity::even}, std::pair{4, Parity::all}}) {
    auto space = enumerate_group(n, par);
    const auto ref = oracle::group(n, par == Parity::even);
    const auto f = random_function(space, rng);
    const auto g = random_function(space, rng);
    const auto fg = convolve(f, g);
    const auto expect = oracle::convolve(ref, to_vec(f.values()), to_vec(g.values()));
    for (std::size_t k = 0; k < expect.size(); ++k) CHECK(fg[k] == doctest::Approx(expect[k]).epsilon(1e-12));
    CHECK(integral(fg) == doctest::Approx(integral(f) * integral(g)).epsilon(1e-12));
  }
}

TEST_CASE("indicator convolution matches dense convolution") {
  auto space = enumerate_group(5, Parity::even);
  const auto x = random_subset(space, 0.3, 1);
  const auto y = random_subset(space, 0.4, 2);
  const auto a = convolve_indicators(x, y);
  const auto b = convolve(GroupFunction::indicator(x), GroupFunction::indicator(y));
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-14));
}

TEST_CASE("group acting on Omega") {
  auto space = enumerate_group(4, Parity::all);
  const auto ref = oracle::group(4, false);
  Rng rng(3);
  const auto f = random_function(space, rng);
  const OmegaFunction u({0.1, 0.7, 0.2, 0.9});
  const auto fu = convolve(f, u);
  for (int w = 0; w < 4; ++w) {
    double s = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k) s += f[k] * u[static_cast<std::size_t>(oracle::inverse(ref[k])[static_cast<std::size_t>(w)])];
    CHECK(fu[static_cast<std::size_t>(w)] == doctest::Approx(s / 24.0).epsilon(1e-12));
  }
}

TEST_CASE("pushforward preserves mass and matches the oracle") {
  for (auto par : {Parity::all, Parity::even}) {
    auto space = enumerate_group(5, par);
    const auto ref = oracle::group(5, par == Parity::even);
    Rng rng(5);
    const auto f = random_function(space, rng);
    for (int i = 0; i < 5; ++i) {
      const auto p = pushforward(f, i);
      const auto e = oracle::pushforward(ref, to_vec(f.values()), i);
      for (int w = 0; w < 5; ++w) CHECK(p[static_cast<std::size_t>(w)] == doctest::Approx(e[static_cast<std::size_t>(w)]).epsilon(1e-12));
      CHECK(integral(p) == doctest::Approx(integral(f)).epsilon(1e-12));
    }
  }
}

TEST_CASE("entropy") {
  auto s3 = enumerate_group(3, Parity::all);
  CHECK(entropy(GroupFunction::constant(s3, 2.5)) == doctest::Approx(0.0));
  CHECK(entropy(GroupFunction::point_mass(s3, 4)) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
  Rng rng(9);
  const auto f = random_function(s3, rng);
  CHECK(entropy(f) == doctest::Approx(oracle::entropy(to_vec(f.values()))).epsilon(1e-12));
  CHECK(entropy(f) >= 0.0);
  CHECK_THROWS_AS(entropy(GroupFunction::constant(s3, 0.0)), DomainError);
}

TEST_CASE("random subsets are reproducible") {
  auto space = enumerate_group(6, Parity::all);
  const auto a = random_subset(space, 0.25, 42);
  const auto b = random_subset(space, 0.25, 42);
  CHECK(a.members() == b.members());
  CHECK(a.density() == doctest::Approx(0.25).epsilon(0.2));
  CHECK(random_subset(space, 0.25, 43).members() != a.members());
}

TEST_CASE("random even permutations are even and roughly uniform") {
  Rng rng(17);
  std::map<oracle::Perm, int> counts;
  const int draws = 24000;
  for (int k = 0; k < draws; ++k) {
    const auto p = random_permutation(4, Parity::even, rng);
    CHECK(p.is_even());
    counts[{p.images().begin(), p.images().end()}]++;
  }
  REQUIRE(counts.size() == 12);
  // 2000 expected per element, sd about 43
  for (const auto& [p, c] : counts) CHECK(std::abs(c - 2000) < 250);
}

TEST_CASE("subset bookkeeping") {
  auto space = enumerate_group(4, Parity::all);
  GroupSubset s(space);
  s.insert(3);
  s.insert(3);
  s.insert(10);
  CHECK(s.size() == 2);
  CHECK(s.contains(10));
  CHECK_FALSE(s.contains(4));
  CHECK(s.density() == doctest::Approx(2.0 / 24));
  CHECK(GroupSubset::full(space).size() == 24);
}
