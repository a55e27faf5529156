#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "permix/constructions.hpp"
#include "permix/errors.hpp"
#include "permix/fourier.hpp"
#include "permix/rng.hpp"

using namespace permix;

namespace {

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

struct Case {
  int n;
  Parity parity;
};

const Case kCases[] = {{3, Parity::all}, {4, Parity::all}, {4, Parity::even}, {5, Parity::even}};

}  // namespace

TEST_CASE("sigma coefficient rows and columns sum to the mean") {
  auto space = enumerate_group(5, Parity::all);
  Rng rng(1);
  const auto f = random_function(space, rng);
  const auto a = sigma_coefficient(f);
  for (int k = 0; k < 5; ++k) {
    double row = 0.0, col = 0.0;
    for (int j = 0; j < 5; ++j) {
      row += a.at(k, j);
      col += a.at(j, k);
    }
    CHECK(row == doctest::Approx(a.mean).epsilon(1e-12));
    CHECK(col == doctest::Approx(a.mean).epsilon(1e-12));
  }
  CHECK(a.mean == doctest::Approx(integral(f)).epsilon(1e-12));
}

TEST_CASE("coefficient of a convolution is the matrix product") {
  auto space = enumerate_group(4, Parity::all);
  Rng rng(2);
  const auto f = random_function(space, rng);
  const auto g = random_function(space, rng);
  const auto direct = sigma_coefficient(convolve(f, g));
  const auto product = coefficient_product(sigma_coefficient(f), sigma_coefficient(g));
  for (std::size_t k = 0; k < direct.coeff.size(); ++k) CHECK(direct.coeff[k] == doctest::Approx(product.coeff[k]).epsilon(1e-12));
}

TEST_CASE("sigma term equals the character projection") {
  Rng rng(3);
  for (const auto& c : kCases) {
    auto space = enumerate_group(c.n, c.parity);
    const auto ref = oracle::group(c.n, c.parity == Parity::even);
    for (int trial = 0; trial < 3; ++trial) {
      const auto f = random_function(space, rng);
      const auto g = random_function(space, rng);
      const auto h = random_function(space, rng);
      const auto rep = decompose_triple(f, g, h);
      const auto fg = oracle::convolve(ref, to_vec(f.values()), to_vec(g.values()));
      const double sigma = oracle::inner(oracle::sigma_part(ref, fg), to_vec(h.values()));
      CHECK(rep.sigma_term == doctest::Approx(sigma).epsilon(1e-12));
      CHECK(rep.total == doctest::Approx(oracle::inner(fg, to_vec(h.values()))).epsilon(1e-12));
      CHECK(rep.main_term == doctest::Approx(integral(f) * integral(g) * integral(h)).epsilon(1e-12));
      CHECK(std::abs(rep.main_term + rep.sigma_term + rep.remainder - rep.total) <= 1e-12);
    }
  }
}

TEST_CASE("exact decomposition for indicators") {
  auto space = enumerate_group(5, Parity::even);
  const auto ref = oracle::group(5, true);
  const auto x = random_subset(space, 0.3, 10);
  const auto y = random_subset(space, 0.4, 11);
  const auto z = random_subset(space, 0.5, 12);
  std::vector<bool> bx, by, bz;
  for (std::size_t k = 0; k < space->order(); ++k) {
    bx.push_back(x.contains(k));
    by.push_back(y.contains(k));
    bz.push_back(z.contains(k));
  }
  const auto count = oracle::count_solutions(ref, bx, by, bz);
  const auto e = decompose_triple_exact(x, y, z);
  CHECK(e.total == Rational(BigInt(count), BigInt(60 * 60)));
  CHECK(e.main_term + e.sigma_term + e.remainder == e.total);
  const auto d = decompose_triple(GroupFunction::indicator(x), GroupFunction::indicator(y), GroupFunction::indicator(z));
  CHECK(to_double(e.sigma_term) == doctest::Approx(d.sigma_term).epsilon(1e-12));
  CHECK(to_double(e.remainder) == doctest::Approx(d.remainder).epsilon(1e-12));
}

TEST_CASE("Kedlaya set: no solutions and a negative sigma term") {
  auto space = enumerate_group(6, Parity::even);
  const auto x = kedlaya_set(space, KedlayaParams::standard(6, 2));
  const auto e = decompose_triple_exact(x, x, x);
  CHECK(e.total == 0);
  CHECK(e.main_term == Rational(1, 125));
  CHECK(e.sigma_term < 0);
}

TEST_CASE("second-term identity") {
  Rng rng(4);
  for (const auto& c : kCases) {
    auto space = enumerate_group(c.n, c.parity);
    for (int trial = 0; trial < 4; ++trial) {
      const auto f = random_function(space, rng);
      const auto g0 = random_function(space, rng);
      const auto g = g0.minus(integral(g0));
      const auto h = random_function(space, rng);
      const auto s = secondterm_identity_check(f, g, h);
      CHECK(std::abs(s.lhs - s.rhs) <= 1e-12);
      // lhs is the sigma term of the decomposition
      CHECK(s.lhs == doctest::Approx(decompose_triple(f, g, h).sigma_term).epsilon(1e-10));
    }
  }
}

TEST_CASE("second-term identity needs a mean-zero input") {
  auto space = enumerate_group(4, Parity::all);
  Rng rng(5);
  const auto f = random_function(space, rng);
  CHECK_THROWS_AS(secondterm_identity_check(f, f, f), DomainError);
}

TEST_CASE("Parseval remnant") {
  Rng rng(6);
  for (const auto& c : kCases) {
    auto space = enumerate_group(c.n, c.parity);
    const auto ref = oracle::group(c.n, c.parity == Parity::even);
    for (int trial = 0; trial < 3; ++trial) {
      const auto f0 = random_function(space, rng);
      const auto f = f0.minus(integral(f0));
      const auto pr = parseval_remnant(f);
      CHECK(pr.norm_squared >= pr.sigma_energy - 1e-12);
      CHECK(std::abs(pr.sigma_energy - pr.pushforward_energy) <= 1e-12);
      // ||P_sigma f||^2 by projection
      const auto p = oracle::sigma_part(ref, to_vec(f.values()));
      CHECK(pr.sigma_energy == doctest::Approx(oracle::inner(p, p)).epsilon(1e-10));
    }
  }
}

TEST_CASE("Parseval remnant is an equality on the sigma isotypic part") {
  auto space = enumerate_group(5, Parity::all);
  const auto ref = oracle::group(5, false);
  std::vector<double> chi;
  for (const auto& p : ref) chi.push_back(oracle::fixed_points(p) - 1.0);
  const auto pr = parseval_remnant(GroupFunction(space, chi));
  CHECK(pr.norm_squared == doctest::Approx(pr.sigma_energy).epsilon(1e-12));
}

TEST_CASE("standard character and minimal dimension") {
  CHECK(standard_character(Permutation::identity(6)) == 5.0);
  CHECK(standard_character(Permutation({1, 0, 2, 3})) == 1.0);
  CHECK(minimal_dimension(*enumerate_group(5, Parity::even)) == 3);
  CHECK(minimal_dimension(*enumerate_group(6, Parity::even)) == 5);
  CHECK(minimal_dimension(9, Parity::even) == 8);
  CHECK(minimal_dimension(4, Parity::even) == 1);
  CHECK_THROWS_AS(minimal_dimension(*enumerate_group(5, Parity::all)), DomainError);
  CHECK_THROWS_AS(minimal_dimension(2, Parity::even), DomainError);
}
