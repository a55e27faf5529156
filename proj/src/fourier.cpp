#include "permix/fourier.hpp"

#include <cmath>
#include <string>

#include "permix/constructions.hpp"
#include "permix/errors.hpp"

namespace permix {

SigmaCoefficient sigma_coefficient(const GroupFunction& f) {
  const GroupSpace& G = f.space();
  const int n = G.n();
  SigmaCoefficient out;
  out.n = n;
  out.coeff.assign(static_cast<std::size_t>(n * n), 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < G.order(); ++r) {
    const double v = f[r];
    total += v;
    if (v == 0.0) continue;
    auto img = G.images(r);
    for (int i = 0; i < n; ++i) out.coeff[static_cast<std::size_t>(img[static_cast<std::size_t>(i)] * n + i)] += v;
  }
  const double scale = 1.0 / static_cast<double>(G.order());
  for (auto& c : out.coeff) c *= scale;
  out.mean = total * scale;
  return out;
}

SigmaCoefficient coefficient_product(const SigmaCoefficient& a, const SigmaCoefficient& b) {
  if (a.n != b.n) throw DomainError("sigma coefficients of different degree");
  const int n = a.n;
  SigmaCoefficient out;
  out.n = n;
  out.coeff.assign(static_cast<std::size_t>(n * n), 0.0);
  for (int r = 0; r < n; ++r)
    for (int k = 0; k < n; ++k) {
      const double ark = a.at(r, k);
      for (int c = 0; c < n; ++c) out.coeff[static_cast<std::size_t>(r * n + c)] += ark * b.at(k, c);
    }
  out.mean = a.mean * b.mean;
  return out;
}

double sigma_hs_product(const SigmaCoefficient& a, const SigmaCoefficient& b) {
  if (a.n != b.n) throw DomainError("sigma coefficients of different degree");
  double s = 0.0;
  for (std::size_t k = 0; k < a.coeff.size(); ++k) s += a.coeff[k] * b.coeff[k];
  return s - a.mean * b.mean;
}

DecompositionReport decompose_triple(const GroupFunction& f, const GroupFunction& g,
                                     const GroupFunction& h) {
  if (!f.space().same_as(g.space()) || !f.space().same_as(h.space())) {
    throw DomainError("decompose_triple: functions live on different groups");
  }
  const int n = f.space().n();
  const auto F = sigma_coefficient(f);
  const auto Gc = sigma_coefficient(g);
  const auto H = sigma_coefficient(h);

  DecompositionReport rep;
  rep.total = inner_product(convolve(f, g), h);
  rep.main_term = F.mean * Gc.mean * H.mean;
  rep.sigma_term = static_cast<double>(n - 1) * sigma_hs_product(coefficient_product(F, Gc), H);
  rep.remainder = rep.total - rep.main_term - rep.sigma_term;
  return rep;
}

namespace {

// counts[w * n + i] = #{pi in X : pi(i) = w}
std::vector<std::int64_t> position_counts(const GroupSubset& x) {
  const GroupSpace& G = x.space();
  const int n = G.n();
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n * n), 0);
  for (std::size_t r : x.members()) {
    auto img = G.images(r);
    for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(img[static_cast<std::size_t>(i)] * n + i)];
  }
  return counts;
}

}  // namespace

ExactDecomposition decompose_triple_exact(const GroupSubset& x, const GroupSubset& y,
                                          const GroupSubset& z) {
  const GroupSpace& G = x.space();
  if (!G.same_as(y.space()) || !G.same_as(z.space())) {
    throw DomainError("decompose_triple_exact: subsets of different groups");
  }
  const int n = G.n();
  const BigInt order = static_cast<std::int64_t>(G.order());
  const auto cx = position_counts(x);
  const auto cy = position_counts(y);
  const auto cz = position_counts(z);

  // <C_X C_Y, C_Z>_HS; the coefficients are these counts over |G|.
  BigInt hs = 0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      BigInt prod = 0;
      for (int k = 0; k < n; ++k) prod += BigInt(cx[static_cast<std::size_t>(r * n + k)]) * cy[static_cast<std::size_t>(k * n + c)];
      hs += prod * cz[static_cast<std::size_t>(r * n + c)];
    }

  ExactDecomposition out;
  const Rational g3 = Rational(order * order * order);
  out.main_term = Rational(BigInt(static_cast<std::int64_t>(x.size())) * static_cast<std::int64_t>(y.size()) *
                           static_cast<std::int64_t>(z.size())) / g3;
  out.sigma_term = Rational(n - 1) * (Rational(hs) / g3 - out.main_term);
  out.total = Rational(BigInt(static_cast<std::int64_t>(count_solutions(x, y, z)))) / Rational(order * order);
  out.remainder = out.total - out.main_term - out.sigma_term;
  return out;
}

IdentitySides secondterm_identity_check(const GroupFunction& f, const GroupFunction& g,
                                        const GroupFunction& h) {
  if (!f.space().same_as(g.space()) || !f.space().same_as(h.space())) {
    throw DomainError("secondterm_identity_check: functions live on different groups");
  }
  auto vanishes = [](const GroupFunction& u) {
    double scale = 0.0;
    for (double v : u.values()) scale = std::max(scale, std::abs(v));
    return std::abs(integral(u)) <= 1e-12 * std::max(1.0, scale);
  };
  if (!vanishes(f) && !vanishes(g) && !vanishes(h)) {
    throw DomainError("secondterm identity needs at least one of f, g, h to have integral zero");
  }

  const int n = f.space().n();
  IdentitySides out;
  const auto F = sigma_coefficient(f);
  out.lhs = static_cast<double>(n - 1) *
            sigma_hs_product(coefficient_product(F, sigma_coefficient(g)), sigma_coefficient(h));

  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += inner_product(convolve(f, pushforward(g, i)), pushforward(h, i));
  }
  out.rhs = static_cast<double>(n - 1) / static_cast<double>(n) * sum;
  return out;
}

ParsevalRemnant parseval_remnant(const GroupFunction& f) {
  const int n = f.space().n();
  ParsevalRemnant out;
  out.norm_squared = inner_product(f, f);
  const auto F = sigma_coefficient(f);
  out.sigma_energy = static_cast<double>(n - 1) * sigma_hs_product(F, F);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto p = pushforward(f, i);
    sum += inner_product(p, p);
  }
  out.pushforward_energy = static_cast<double>(n - 1) / static_cast<double>(n) * sum;
  return out;
}

double standard_character(const Permutation& p) { return static_cast<double>(p.fixed_points() - 1); }

int minimal_dimension(int n, Parity parity) {
  const std::string name = (parity == Parity::even ? "A_" : "S_") + std::to_string(n);
  if (parity != Parity::even) {
    throw DomainError("minimal representation dimension is tabulated for A_n only; pass m explicitly for " + name);
  }
  if (n <= 2) throw DomainError(name + " is trivial and has no nontrivial representation");
  if (n <= 4) return 1;
  if (n == 5) return 3;
  if (n == 6) return 5;
  return n - 1;
}

int minimal_dimension(const GroupSpace& space) { return minimal_dimension(space.n(), space.parity()); }

}  // namespace permix
