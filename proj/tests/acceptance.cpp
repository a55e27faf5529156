// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "permix/concentration.hpp"
#include "permix/constructions.hpp"
#include "permix/fourier.hpp"
#include "permix/inequalities.hpp"
#include "permix/mixing.hpp"
#include "permix/report.hpp"
#include "permix/rng.hpp"

using namespace permix;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string num(double x) { return format_number(x); }

// Multiplication table in library rank order, built from the oracle's
// compose so that counts do not go through GroupSpace::compose.
struct ProductTable {
  std::size_t order;
  std::vector<std::uint32_t> prod;

  explicit ProductTable(const GroupSpace& g) : order(g.order()), prod(order * order) {
    std::vector<oracle::Perm> perms;
    std::map<oracle::Perm, std::size_t> rank;
    for (std::size_t k = 0; k < order; ++k) {
      const auto img = g.images(k);
      perms.emplace_back(img.begin(), img.end());
      rank[perms.back()] = k;
    }
    for (std::size_t a = 0; a < order; ++a)
      for (std::size_t b = 0; b < order; ++b) prod[a * order + b] = static_cast<std::uint32_t>(rank.at(oracle::compose(perms[a], perms[b])));
  }

  std::uint64_t count(const GroupSubset& x, const GroupSubset& y, const GroupSubset& z) const {
    std::uint64_t c = 0;
    for (std::size_t a = 0; a < order; ++a) {
      if (!x.contains(a)) continue;
      for (std::size_t b = 0; b < order; ++b) c += y.contains(b) && z.contains(prod[a * order + b]);
    }
    return c;
  }

  // sigma term by the character projection (n-1) <chi * (f * g), h>
  double sigma_term(const GroupSpace& g, std::span<const double> f, std::span<const double> h2,
                    std::span<const double> h) const {
    std::vector<std::uint32_t> inv(order);
    for (std::size_t a = 0; a < order; ++a)
      for (std::size_t b = 0; b < order; ++b)
        if (prod[a * order + b] == 0) inv[a] = static_cast<std::uint32_t>(b);  // rank 0 is the identity
    auto conv = [&](std::span<const double> u, std::span<const double> w) {
      std::vector<double> out(order, 0.0);
      for (std::size_t y = 0; y < order; ++y) {
        if (u[y] == 0.0) continue;
        for (std::size_t x = 0; x < order; ++x) out[x] += u[y] * w[prod[inv[y] * order + x]];
      }
      for (auto& v : out) v /= static_cast<double>(order);
      return out;
    };
    std::vector<double> chi(order);
    for (std::size_t k = 0; k < order; ++k) chi[k] = g.element(k).fixed_points() - 1.0;
    const auto fg = conv(f, h2);
    const auto p = conv(chi, fg);
    double s = 0.0;
    for (std::size_t k = 0; k < order; ++k) s += p[k] * h[k];
    return (g.n() - 1) * s / static_cast<double>(order);
  }
};

// 1 -------------------------------------------------------------------------
Outcome decomposition_identity() {
  Outcome o;
  double worst_identity = 0.0, worst_sigma = 0.0;
  int count_mismatches = 0;
  const std::pair<int, Parity> groups[] = {{4, Parity::all}, {5, Parity::all}, {5, Parity::even}, {6, Parity::even}};
  for (const auto& [n, par] : groups) {
    auto space = enumerate_group(n, par);
    const ProductTable table(*space);
    Rng rng(mix_seed(1, static_cast<std::uint64_t>(n * 2 + (par == Parity::even))));
    for (int trial = 0; trial < 200; ++trial) {
      const auto f = random_function(space, rng);
      const auto g = random_function(space, rng);
      const auto h = random_function(space, rng);
      const auto d = decompose_triple(f, g, h);
      worst_identity = std::max(worst_identity, std::abs(d.main_term + d.sigma_term + d.remainder - d.total));
      worst_sigma = std::max(worst_sigma, std::abs(d.sigma_term - table.sigma_term(*space, f.values(), g.values(), h.values())));

      const auto seed = rng.next();
      const double dens = 0.1 + 0.8 * rng.uniform();
      const auto x = random_subset(space, dens, mix_seed(seed, 0));
      const auto y = random_subset(space, dens, mix_seed(seed, 1));
      const auto z = random_subset(space, dens, mix_seed(seed, 2));
      const auto e = decompose_triple_exact(x, y, z);
      const BigInt order(space->order());
      if (e.total != Rational(BigInt(table.count(x, y, z)), order * order)) ++count_mismatches;
      if (e.main_term + e.sigma_term + e.remainder != e.total) ++count_mismatches;
    }
  }
  o.pass = worst_identity <= 1e-12 && worst_sigma <= 1e-12 && count_mismatches == 0;
  o.detail = "max |main+sigma+rem-total| " + num(worst_identity) + ", max |sigma - projection| " + num(worst_sigma) +
             ", exact count mismatches " + std::to_string(count_mismatches);
  return o;
}

// 2 -------------------------------------------------------------------------
Outcome secondterm_identity() {
  double worst = 0.0;
  for (const auto& [n, par] : {std::pair{4, Parity::all}, std::pair{5, Parity::even}}) {
    auto space = enumerate_group(n, par);
    Rng rng(mix_seed(2, static_cast<std::uint64_t>(n)));
    for (int trial = 0; trial < 200; ++trial) {
      const auto f = random_function(space, rng);
      const auto g0 = random_function(space, rng);
      const auto h = random_function(space, rng);
      const auto s = secondterm_identity_check(f, g0.minus(integral(g0)), h);
      worst = std::max(worst, std::abs(s.lhs - s.rhs));
    }
  }
  return {worst <= 1e-12, "max |lhs - rhs| " + num(worst)};
}

// 3 -------------------------------------------------------------------------
Outcome parseval_remnant_check() {
  auto space = enumerate_group(5, Parity::even);
  Rng rng(3);
  double min_defect = INFINITY, worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto f0 = random_function(space, rng);
    const auto p = parseval_remnant(f0.minus(integral(f0)));
    min_defect = std::min(min_defect, p.norm_squared - p.sigma_energy);
    worst = std::max(worst, std::abs(p.sigma_energy - p.pushforward_energy));
  }
  return {min_defect >= -1e-12 && worst <= 1e-12,
          "min defect " + num(min_defect) + ", max |sigma - pushforward| " + num(worst)};
}

// 4 -------------------------------------------------------------------------
Outcome gowers_bound() {
  int violations = 0;
  double worst_ratio = 0.0;
  for (const auto& [n, m] : {std::pair{5, 3}, std::pair{6, 5}}) {
    auto space = enumerate_group(n, Parity::even);
    Rng rng(mix_seed(4, static_cast<std::uint64_t>(n)));
    for (int trial = 0; trial < 1000; ++trial) {
      const auto s = rng.next();
      const auto x = random_subset(space, 0.05 + 0.9 * rng.uniform(), mix_seed(s, 0));
      const auto y = random_subset(space, 0.05 + 0.9 * rng.uniform(), mix_seed(s, 1));
      const auto z = random_subset(space, 0.05 + 0.9 * rng.uniform(), mix_seed(s, 2));
      if (x.size() == 0 || y.size() == 0 || z.size() == 0) continue;
      const auto r = mixing_exact(x, y, z, m);
      const double dev = std::abs(r.total - r.main);
      if (dev > r.gowers_bound) ++violations;
      worst_ratio = std::max(worst_ratio, dev / r.gowers_bound);
    }
  }
  return {violations == 0, std::to_string(violations) + " violations, max deviation/bound " + num(worst_ratio)};
}

// 5 -------------------------------------------------------------------------
Outcome kedlaya() {
  int formula_mismatch = 0, formulas = 0;
  for (int n = 3; n <= 9; ++n) {
    auto space = enumerate_group(n, Parity::all);
    for (int t = 1; 2 * t + 1 <= n; ++t) {
      const auto x = kedlaya_set(space, KedlayaParams::standard(n, t));
      ++formulas;
      if (Rational(BigInt(x.size()), BigInt(space->order())) != kedlaya_density_formula(n, t).binomial_form) ++formula_mismatch;
    }
  }
  Rng rng(5);
  int not_free = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(6));
    const int t = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>((n - 1) / 2)));
    std::vector<int> pts(static_cast<std::size_t>(n));
    std::iota(pts.begin(), pts.end(), 0);
    for (int k = n - 1; k > 0; --k) std::swap(pts[static_cast<std::size_t>(k)], pts[rng.below(static_cast<std::uint64_t>(k + 1))]);
    KedlayaParams p;
    p.n = n;
    p.T.assign(pts.begin(), pts.begin() + t);
    std::sort(p.T.begin(), p.T.end());
    p.basepoint = pts[static_cast<std::size_t>(t)];
    if (!product_free_check(kedlaya_set(enumerate_group(n, Parity::all), p)).product_free) ++not_free;
  }
  const auto oracle = kedlaya_oracle(KedlayaParams::standard(400, 20), Parity::all);
  const auto mc = mixing_monte_carlo(oracle, oracle, oracle, 400, Parity::all, 1000000, 5, 1);
  return {formula_mismatch == 0 && not_free == 0 && mc.solutions == 0 && mc.samples == 1000000,
          std::to_string(formulas - formula_mismatch) + "/" + std::to_string(formulas) + " densities exact, " +
              std::to_string(50 - not_free) + "/50 product-free, " + std::to_string(mc.solutions) + " solutions in " +
              std::to_string(mc.samples) + " samples at n=400 t=20"};
}

// 6 -------------------------------------------------------------------------
Outcome surplus() {
  std::string detail;
  bool ok = true;
  for (int n : {6, 7}) {
    auto space = enumerate_group(n, Parity::even);
    for (int t : {2, 3}) {
      const auto r = surplus_ratio(space, SurplusParams::standard(n, t));
      ok = ok && r.excess > 1;
      detail += space->name() + " t=" + std::to_string(t) + ": " + to_string(r.excess) + ", ";
    }
  }
  const auto oracle = surplus_oracle(SurplusParams::standard(1000, 10), Parity::all);
  const auto mc = mixing_monte_carlo(oracle, oracle, oracle, 1000, Parity::all, 200000, 6, 1);
  const bool excludes = mc.excess_ci_low > 1.0 || mc.excess_ci_high < 1.0;
  detail += "n=1000 t=10 CI [" + num(mc.excess_ci_low) + ", " + num(mc.excess_ci_high) + "]";
  return {ok && excludes, detail};
}

// 7 -------------------------------------------------------------------------
Outcome cll_and_hadamard() {
  Rng rng(7);
  int cll_bad = 0, had_bad = 0, ryser_bad = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 7;
    std::vector<OmegaFunction> fs;
    for (int i = 0; i < n; ++i) {
      std::vector<double> v(static_cast<std::size_t>(n));
      for (auto& x : v) x = rng.uniform();
      fs.emplace_back(v);
    }
    const auto s = cll_check(fs);
    if (s.lhs > s.rhs * (1 + 1e-12)) ++cll_bad;
  }
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 10;
    RealMatrix m{n, {}};
    for (int k = 0; k < n * n; ++k) m.entries.push_back(rng.normal());
    const auto s = hadamard_permanent_check(PermanentInstance(m));
    if (s.lhs > s.rhs * (1 + 1e-12)) ++had_bad;
  }
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 6;
    RationalMatrix q{n, {}};
    for (int k = 0; k < n * n; ++k) q.entries.emplace_back(static_cast<long>(rng.below(21)) - 10, static_cast<long>(rng.below(6)) + 1);
    if (permanent(q) != permanent_brute_force(q)) ++ryser_bad;
  }
  return {cll_bad == 0 && had_bad == 0 && ryser_bad == 0,
          "CLL violations " + std::to_string(cll_bad) + ", Hadamard violations " + std::to_string(had_bad) +
              ", Ryser/brute-force mismatches " + std::to_string(ryser_bad)};
}

// 8 -------------------------------------------------------------------------
Outcome subadditivity() {
  int bad = 0;
  for (int n : {4, 5}) {
    auto space = enumerate_group(n, Parity::all);
    Rng rng(mix_seed(8, static_cast<std::uint64_t>(n)));
    for (int trial = 0; trial < 500; ++trial) {
      const auto s = subadditivity_check(random_function(space, rng));
      if (s.lhs < s.rhs - 1e-12) ++bad;
    }
  }
  const auto two = subadditivity_check(GroupFunction::point_mass(enumerate_group(2, Parity::all), 0));
  const double equality = std::abs(two.lhs - two.rhs);
  double margin_err = 0.0;
  for (int n = 4; n <= 7; ++n) {
    const auto s = subadditivity_check(GroupFunction::point_mass(enumerate_group(n, Parity::all), 0));
    const double expect = std::log(oracle::factorial(n)) - 0.5 * n * std::log(static_cast<double>(n));
    margin_err = std::max(margin_err, std::abs((s.lhs - s.rhs) - expect));
  }
  return {bad == 0 && equality <= 1e-12 && margin_err <= 1e-12,
          std::to_string(bad) + " violations, S_2 point-mass gap " + num(equality) + ", margin error n=4..7 " + num(margin_err)};
}

// 9 -------------------------------------------------------------------------
Outcome exp_moment() {
  Rng rng(9);
  int moment_bad = 0, cll_bad = 0;
  double min_c = INFINITY;
  SpacePtr spaces[] = {enumerate_group(4, Parity::all), enumerate_group(5, Parity::all), enumerate_group(6, Parity::all)};
  for (int trial = 0; trial < 500; ++trial) {
    const auto& space = spaces[trial % 3];
    const auto a = center(random_instance(space->n(), rng));
    for (int k = 1; k <= 20; ++k) {
      const double lambda = k / 21.0 / (2 * a.max_abs());
      const auto mp = exp_moment_pair(a, lambda, *space);
      const auto st = cll_exp_moment_step(a, lambda, *space);
      if (mp.exact > mp.bound * (1 + 1e-12)) ++moment_bad;
      if (st.exact > st.bound * (1 + 1e-12)) ++cll_bad;
    }
    min_c = std::min(min_c, fitted_bernstein_constant(a, hoeffding_exact_distribution(a, *space)));
  }
  return {moment_bad == 0 && cll_bad == 0 && min_c >= 1.0 / 16,
          "moment violations " + std::to_string(moment_bad) + ", CLL step violations " + std::to_string(cll_bad) +
              ", min fitted c " + num(min_c)};
}

// 10 ------------------------------------------------------------------------
Outcome extremal() {
  const int n = 20;
  double worst = 0.0;
  int points = 0;
  for (double beta : {0.2, 0.4, 0.6, 0.8, 1.0})
    for (double x : {0.001, 0.01, 0.1, 0.5, 1.0})
      for (int k : {1, 2, 5, 10}) {
        const double delta = static_cast<double>(k) / n, t = x * beta;
        worst = std::max(worst, std::abs(extremal_entropy_low(beta, t, delta).entropy - entropy(two_level_low(n, beta, t, delta))));
        worst = std::max(worst, std::abs(extremal_entropy_high(beta, t, delta).entropy - entropy(two_level_high(n, beta, t, delta))));
        ++points;
      }
  return {points == 100 && worst <= 1e-12, std::to_string(points) + " grid points, max |formula - direct| " + num(worst)};
}

// 11 ------------------------------------------------------------------------
Outcome dyadic() {
  Rng rng(11);
  int bad = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = trial % 4 == 3 ? 10000 : static_cast<int>(std::pow(10, 1 + trial % 4));
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = rng.uniform();
    const OmegaFunction g(v);
    const auto pieces = dyadic_decompose(g);
    std::vector<double> recon(v.size(), integral(g));
    bool ok = true;
    for (const auto& p : pieces) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double y = p.values[i];
        if (y == 0.0) continue;
        recon[i] += y;
        ok = ok && std::abs(y) > std::abs(p.scale) / 2 && std::abs(y) <= std::abs(p.scale) && (y > 0) == (p.scale > 0);
      }
    }
    double err = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) err = std::max(err, std::abs(recon[i] - v[i]));
    worst = std::max(worst, err / (n * kDefaultDyadicFloor));
    if (!ok || err > n * kDefaultDyadicFloor) ++bad;
  }
  return {bad == 0, std::to_string(bad) + " failing functions, max error / (n floor) " + num(worst)};
}

// 12 ------------------------------------------------------------------------
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const std::string bin = PERMIX_BINARY;
  const std::vector<std::string> configs = {
      "mixing --n 5 --parity even --random-triple --density 0.3 --seed 7",
      "construct surplus --n 200 --t 4 --monte-carlo --samples 50000 --seed 12",
      "fourier decompose --n 5 --parity even --trials 20 --seed 4 --density 0.4 --rational",
      "concentration levelset --n 30 --monte-carlo --samples 30000 --seed 2 --format csv",
      "inequality cll --n 5 --trials 500 --seed 1",
  };
  int differ = 0;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    std::string outputs[3];
    const char* threads[] = {"1", "1", "8"};
    for (int run = 0; run < 3; ++run) {
      const std::string path = "acceptance_determinism_" + std::to_string(k) + "_" + std::to_string(run);
      const std::string cmd = bin + " " + configs[k] + " --threads " + threads[run] + " --output " + path + " 2>/dev/null";
      if (std::system(cmd.c_str()) != 0) {
        ++differ;
        continue;
      }
      outputs[run] = slurp(path);
      std::remove(path.c_str());
    }
    if (outputs[0].empty() || outputs[0] != outputs[1] || outputs[0] != outputs[2]) ++differ;
  }
  return {differ == 0, std::to_string(configs.size() - static_cast<std::size_t>(differ)) + "/" +
                           std::to_string(configs.size()) + " configs byte-identical across runs and threads 1/8"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;  // 0 = no runtime limit
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "decomposition identity", 60, decomposition_identity},
      {2, "second-term identity", 30, secondterm_identity},
      {3, "Parseval remnant", 0, parseval_remnant_check},
      {4, "Gowers bound", 120, gowers_bound},
      {5, "Kedlaya sets", 0, kedlaya},
      {6, "surplus sets", 0, surplus},
      {7, "CLL and permanent bound", 60, cll_and_hadamard},
      {8, "entropy subadditivity", 0, subadditivity},
      {9, "exponential moment and CLL step", 0, exp_moment},
      {10, "extremal entropy", 0, extremal},
      {11, "dyadic decomposition", 20, dyadic},
      {12, "determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = num(std::round(secs * 100) / 100) + " s";
    if (c.limit_seconds > 0) {
      timing += " (limit " + num(c.limit_seconds) + " s)";
      if (secs >= c.limit_seconds) o.pass = false;
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s [%s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of 12 criteria passed\n", 12 - failed);
  return failed;
}
