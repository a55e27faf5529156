#include "permix/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>

#include "permix/concentration.hpp"
#include "permix/constructions.hpp"
#include "permix/errors.hpp"
#include "permix/fourier.hpp"
#include "permix/inequalities.hpp"
#include "permix/mixing.hpp"
#include "permix/parallel.hpp"
#include "permix/rational.hpp"
#include "permix/rng.hpp"

#ifndef PERMIX_VERSION
#define PERMIX_VERSION "0.1.0-unknown"
#endif

namespace permix::cli {

std::string command_name(Command c) {
  switch (c) {
    case Command::mixing: return "mixing";
    case Command::construct: return "construct";
    case Command::fourier: return "fourier";
    case Command::concentration: return "concentration";
    case Command::inequality: return "inequality";
    case Command::threshold: return "threshold";
  }
  return "?";
}

std::string version() { return PERMIX_VERSION; }

namespace {

// 1e-12 relative slack for "lhs <= rhs" style checks on doubles
constexpr double kRelTol = 1e-12;

bool exceeds(double lhs, double rhs) { return lhs > rhs + kRelTol * std::max(1.0, std::abs(rhs)); }

std::string parity_text(Parity p) { return p == Parity::even ? "even" : "all"; }

std::string group_name(int n, Parity p) { return (p == Parity::even ? "A_" : "S_") + std::to_string(n); }

Parity parity_or(const ExperimentConfig& c, Parity fallback) { return c.parity.value_or(fallback); }

std::uint64_t require_seed(const ExperimentConfig& c) {
  if (!c.seed) throw DomainError("--seed is required for randomized experiments");
  return *c.seed;
}

void require_n(const ExperimentConfig& c, int lo) {
  if (c.n < lo) throw DomainError("--n must be at least " + std::to_string(lo));
}

Json one_based(std::span<const int> points) {
  Json a = Json::array();
  for (int p : points) a.push_back(p + 1);
  return a;
}

Json one_based(std::span<const std::uint8_t> points) {
  Json a = Json::array();
  for (auto p : points) a.push_back(static_cast<int>(p) + 1);
  return a;
}

Json rational_json(const Rational& r) { return to_string(r); }

std::vector<int> zero_based_points(const std::vector<int>& pts, int n) {
  std::vector<int> out;
  for (int p : pts) {
    if (p < 1 || p > n) throw DomainError("point " + std::to_string(p) + " is outside 1.." + std::to_string(n));
    out.push_back(p - 1);
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw DomainError("--T has repeated points");
  return out;
}

KedlayaParams kedlaya_params(const ExperimentConfig& c) {
  KedlayaParams p;
  if (c.T.empty()) {
    p = KedlayaParams::standard(c.n, c.t.value_or(1));
  } else {
    p.n = c.n;
    p.T = zero_based_points(c.T, c.n);
    if (c.t && *c.t != p.t()) throw DomainError("--t disagrees with the size of --T");
    p.basepoint = 0;
    while (std::binary_search(p.T.begin(), p.T.end(), p.basepoint)) ++p.basepoint;
  }
  if (c.basepoint) p.basepoint = *c.basepoint - 1;
  p.validate();
  return p;
}

SurplusParams surplus_params(const ExperimentConfig& c) {
  SurplusParams p;
  if (c.T.empty()) {
    p = SurplusParams::standard(c.n, c.t.value_or(1));
  } else {
    p.n = c.n;
    p.T = zero_based_points(c.T, c.n);
    if (c.t && *c.t != p.t()) throw DomainError("--t disagrees with the size of --T");
  }
  p.validate();
  return p;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double density_or(const ExperimentConfig& c, double fallback) {
  const double d = c.density.value_or(fallback);
  if (!(d > 0.0 && d <= 1.0)) throw DomainError("--density must lie in (0, 1]");
  return d;
}

// ---------------------------------------------------------------- mixing

void put_mixing(Json& s, const MixingReport& r) {
  s["method"] = r.method == Method::exact ? "exact" : "monte_carlo";
  s["n"] = r.n;
  s["m"] = r.m;
  s["alpha"] = r.alpha;
  s["beta"] = r.beta;
  s["gamma"] = r.gamma;
  s["total"] = r.total;
  s["main"] = r.main;
  s["deviation"] = std::abs(r.total - r.main);
  s["gowers_bound"] = r.gowers_bound;
  s["within_gowers_bound"] = std::abs(r.total - r.main) <= r.gowers_bound;
  s["threshold_margin"] = r.threshold_margin;
  s["solutions"] = r.solutions;
  s["excess"] = r.excess;
  if (r.method == Method::monte_carlo) {
    s["samples"] = r.samples;
    s["std_error"] = r.std_error;
    s["excess_ci_low"] = r.excess_ci_low;
    s["excess_ci_high"] = r.excess_ci_high;
  }
}

void put_exact_decomposition(Json& s, const ExactDecomposition& e) {
  s["total_exact"] = rational_json(e.total);
  s["main_exact"] = rational_json(e.main_term);
  s["sigma_term_exact"] = rational_json(e.sigma_term);
  s["remainder_exact"] = rational_json(e.remainder);
}

Report run_mixing(const ExperimentConfig& c) {
  require_n(c, 1);
  const Parity parity = parity_or(c, Parity::even);
  const int m = c.m ? *c.m : minimal_dimension(c.n, parity);
  if (m < 1) throw DomainError("--m must be positive");

  Report r;
  r.table.columns = {"set", "size", "density"};
  Json& s = r.summary;
  s["group"] = group_name(c.n, parity);
  s["family"] = c.family;
  MixingReport mr;
  std::optional<ExactDecomposition> exact;

  if (c.family == "random") {
    const auto seed = require_seed(c);
    const double d = density_or(c, 0.3);
    auto space = enumerate_group(c.n, parity);
    const auto x = random_subset(space, d, mix_seed(seed, 0));
    const auto y = random_subset(space, d, mix_seed(seed, 1));
    const auto z = random_subset(space, d, mix_seed(seed, 2));
    if (c.monte_carlo) {
      mr = mixing_monte_carlo(subset_oracle(x), subset_oracle(y), subset_oracle(z), c.n, parity, c.samples,
                              mix_seed(seed, 3), m);
    } else {
      mr = mixing_exact(x, y, z, m);
      if (c.rational_mode) exact = decompose_triple_exact(x, y, z);
    }
    const char* names[] = {"X", "Y", "Z"};
    const GroupSubset* sets[] = {&x, &y, &z};
    for (int k = 0; k < 3; ++k) r.table.add_row({names[k], sets[k]->size(), sets[k]->density()});
  } else if (c.family == "kedlaya" || c.family == "surplus") {
    const bool ked = c.family == "kedlaya";
    if (c.monte_carlo) {
      const auto seed = require_seed(c);
      const auto oracle = ked ? kedlaya_oracle(kedlaya_params(c), parity) : surplus_oracle(surplus_params(c), parity);
      mr = mixing_monte_carlo(oracle, oracle, oracle, c.n, parity, c.samples, seed, m);
      r.table.add_row({oracle.name, nullptr, mr.alpha});
    } else {
      auto space = enumerate_group(c.n, parity);
      const auto x = ked ? kedlaya_set(space, kedlaya_params(c)) : surplus_set(space, surplus_params(c));
      if (x.size() == 0) throw DomainError("the chosen set is empty");
      mr = mixing_exact(x, x, x, m);
      if (c.rational_mode) exact = decompose_triple_exact(x, x, x);
      r.table.add_row({c.family, x.size(), x.density()});
    }
  } else {
    throw DomainError("--family must be random, kedlaya or surplus");
  }
  put_mixing(s, mr);
  if (exact) put_exact_decomposition(s, *exact);
  return r;
}

// ------------------------------------------------------------- construct

Report run_kedlaya(const ExperimentConfig& c) {
  const auto p = kedlaya_params(c);
  const auto formula = kedlaya_density_formula(c.n, p.t());
  Report r;
  Json& s = r.summary;
  s["n"] = c.n;
  s["t"] = p.t();
  s["T"] = one_based(p.T);
  s["basepoint"] = p.basepoint + 1;
  s["density"] = rational_json(formula.binomial_form);
  s["density_value"] = formula.value;
  s["closed_forms_agree"] = formula.binomial_form == formula.factorial_form;

  r.table.columns = {"group", "order", "size", "density", "density_value", "matches_formula"};
  const EnumerationCaps caps;
  if (c.n <= caps.symmetric) {
    for (Parity par : {Parity::all, Parity::even}) {
      auto space = enumerate_group(c.n, par);
      const auto x = kedlaya_set(space, p);
      const Rational d(BigInt(x.size()), BigInt(space->order()));
      r.table.add_row({space->name(), space->order(), x.size(), rational_json(d), to_double(d),
                       d == formula.binomial_form});
    }
  }

  const Parity parity = parity_or(c, Parity::all);
  if (c.check_product_free) {
    auto space = enumerate_group(c.n, parity);
    const auto x = kedlaya_set(space, p);
    const auto pf = product_free_check(x);
    s["product_free_group"] = space->name();
    s["product_free"] = pf.product_free;
    if (pf.witness) {
      Json w = Json::array();
      for (auto rank : *pf.witness) w.push_back(one_based(space->images(rank)));
      s["witness"] = w;
    } else {
      s["witness"] = nullptr;
    }
  }
  if (c.monte_carlo) {
    const auto seed = require_seed(c);
    const auto oracle = kedlaya_oracle(p, parity);
    const auto mr = mixing_monte_carlo(oracle, oracle, oracle, c.n, parity, c.samples, seed, 1);
    s["monte_carlo_group"] = group_name(c.n, parity);
    s["monte_carlo_samples"] = mr.samples;
    s["monte_carlo_solutions"] = mr.solutions;
  }
  return r;
}

Report run_surplus(const ExperimentConfig& c) {
  const auto p = surplus_params(c);
  const Parity parity = parity_or(c, Parity::all);
  Report r;
  Json& s = r.summary;
  s["n"] = c.n;
  s["group"] = group_name(c.n, parity);
  s["t"] = p.t();
  s["T"] = one_based(p.T);
  const Rational formula = surplus_density_formula(c.n, p.t());
  s["density_formula"] = rational_json(formula);
  r.table.columns = {"n", "group", "t", "density", "solutions", "excess"};

  if (!c.monte_carlo) {
    auto space = enumerate_group(c.n, parity);
    const auto sr = surplus_ratio(space, p);
    s["method"] = "exact";
    s["density"] = rational_json(sr.density);
    s["density_value"] = to_double(sr.density);
    s["solutions"] = sr.solutions;
    s["excess"] = rational_json(sr.excess);
    s["excess_value"] = to_double(sr.excess);
    s["excess_above_one"] = sr.excess > 1;
    r.table.add_row({c.n, space->name(), p.t(), to_double(sr.density), sr.solutions, to_double(sr.excess)});
  } else {
    const auto seed = require_seed(c);
    const auto oracle = surplus_oracle(p, parity);
    const auto mr = mixing_monte_carlo(oracle, oracle, oracle, c.n, parity, c.samples, seed, 1);
    s["method"] = "monte_carlo";
    s["density_value"] = mr.alpha;
    s["samples"] = mr.samples;
    s["hits"] = mr.solutions;
    s["excess"] = mr.excess;
    s["std_error"] = mr.std_error;
    s["excess_ci_low"] = mr.excess_ci_low;
    s["excess_ci_high"] = mr.excess_ci_high;
    s["ci_excludes_one"] = mr.excess_ci_low > 1.0 || mr.excess_ci_high < 1.0;
    r.table.add_row({c.n, group_name(c.n, parity), p.t(), mr.alpha, mr.solutions, mr.excess});
  }
  return r;
}

Report run_surplus_table(const ExperimentConfig& c) {
  require_n(c, 2);
  const Parity parity = parity_or(c, Parity::all);
  auto space = enumerate_group(c.n, parity);
  Report r;
  r.table.columns = {"n", "group", "t", "density", "density_value", "solutions", "excess", "excess_value"};
  int above = 0;
  for (int t = 1; 2 * t <= c.n; ++t) {
    const auto sr = surplus_ratio(space, SurplusParams::standard(c.n, t));
    if (sr.excess > 1) ++above;
    r.table.add_row({c.n, space->name(), t, rational_json(sr.density), to_double(sr.density), sr.solutions,
                     rational_json(sr.excess), to_double(sr.excess)});
  }
  r.summary["group"] = space->name();
  r.summary["rows"] = r.table.rows.size();
  r.summary["rows_with_excess_above_one"] = above;
  return r;
}

// --------------------------------------------------------------- fourier

Report run_decompose(const ExperimentConfig& c) {
  const auto seed = require_seed(c);
  const Parity parity = parity_or(c, Parity::all);
  auto space = enumerate_group(c.n, parity);
  Rng rng(seed);
  Report r;
  r.table.columns = {"trial", "total", "main", "sigma_term", "remainder", "identity_residual", "count_residual"};
  const bool indicators = c.density.has_value();
  const double d = indicators ? density_or(c, 0.5) : 0.0;
  const double order = static_cast<double>(space->order());
  double max_identity = 0.0, max_count = 0.0;
  int exact_mismatches = 0;
  for (int trial = 0; trial < c.trials; ++trial) {
    Json count_residual = nullptr;
    DecompositionReport rep;
    if (indicators) {
      const auto base = static_cast<std::uint64_t>(trial) * 3;
      const auto x = random_subset(space, d, mix_seed(seed, base));
      const auto y = random_subset(space, d, mix_seed(seed, base + 1));
      const auto z = random_subset(space, d, mix_seed(seed, base + 2));
      rep = decompose_triple(GroupFunction::indicator(x), GroupFunction::indicator(y), GroupFunction::indicator(z));
      const auto solutions = count_solutions(x, y, z);
      const double diff = std::abs(rep.total - static_cast<double>(solutions) / (order * order));
      max_count = std::max(max_count, diff);
      count_residual = diff;
      if (c.rational_mode) {
        const auto e = decompose_triple_exact(x, y, z);
        const Rational expected(BigInt(solutions), BigInt(space->order()) * BigInt(space->order()));
        if (e.total != expected || e.main_term + e.sigma_term + e.remainder != e.total) ++exact_mismatches;
      }
    } else {
      const auto f = random_function(space, rng);
      const auto g = random_function(space, rng);
      const auto h = random_function(space, rng);
      rep = decompose_triple(f, g, h);
    }
    const double residual = std::abs(rep.main_term + rep.sigma_term + rep.remainder - rep.total);
    max_identity = std::max(max_identity, residual);
    r.table.add_row({trial, rep.total, rep.main_term, rep.sigma_term, rep.remainder, residual, count_residual});
  }
  Json& s = r.summary;
  s["group"] = space->name();
  s["trials"] = c.trials;
  s["inputs"] = indicators ? "indicators" : "real";
  s["max_identity_residual"] = max_identity;
  s["max_count_residual"] = indicators ? Json(max_count) : Json(nullptr);
  if (indicators && c.rational_mode) s["exact_mismatches"] = exact_mismatches;
  return r;
}

Report run_secondterm(const ExperimentConfig& c) {
  const auto seed = require_seed(c);
  auto space = enumerate_group(c.n, parity_or(c, Parity::all));
  Rng rng(seed);
  Report r;
  r.table.columns = {"trial", "lhs", "rhs", "abs_diff"};
  double worst = 0.0;
  for (int trial = 0; trial < c.trials; ++trial) {
    const auto f = random_function(space, rng);
    const auto g0 = random_function(space, rng);
    const auto g = g0.minus(integral(g0));
    const auto h = random_function(space, rng);
    const auto sides = secondterm_identity_check(f, g, h);
    const double diff = std::abs(sides.lhs - sides.rhs);
    worst = std::max(worst, diff);
    r.table.add_row({trial, sides.lhs, sides.rhs, diff});
  }
  r.summary["group"] = space->name();
  r.summary["trials"] = c.trials;
  r.summary["max_abs_diff"] = worst;
  return r;
}

Report run_parseval(const ExperimentConfig& c) {
  const auto seed = require_seed(c);
  auto space = enumerate_group(c.n, parity_or(c, Parity::all));
  Rng rng(seed);
  Report r;
  r.table.columns = {"trial", "norm_squared", "sigma_energy", "pushforward_energy", "defect", "identity_diff"};
  double min_defect = INFINITY, worst = 0.0;
  for (int trial = 0; trial < c.trials; ++trial) {
    const auto f0 = random_function(space, rng);
    const auto pr = parseval_remnant(f0.minus(integral(f0)));
    const double defect = pr.norm_squared - pr.sigma_energy;
    const double diff = std::abs(pr.sigma_energy - pr.pushforward_energy);
    min_defect = std::min(min_defect, defect);
    worst = std::max(worst, diff);
    r.table.add_row({trial, pr.norm_squared, pr.sigma_energy, pr.pushforward_energy, defect, diff});
  }
  r.summary["group"] = space->name();
  r.summary["trials"] = c.trials;
  r.summary["min_defect"] = min_defect;
  r.summary["max_identity_diff"] = worst;
  return r;
}

// --------------------------------------------------------- concentration

std::vector<ConcentrationInstance> instances(const ExperimentConfig& c) {
  std::vector<ConcentrationInstance> out;
  if (!c.matrix_path.empty()) {
    out.push_back(parse_instance_csv(read_file(c.matrix_path)));
    return out;
  }
  require_n(c, 1);
  Rng rng(require_seed(c));
  for (int k = 0; k < c.trials; ++k) out.push_back(random_instance(c.n, rng));
  return out;
}

Report run_exp_moment(const ExperimentConfig& c) {
  if (c.lambdas < 1) throw DomainError("--lambdas must be positive");
  const auto corpus = instances(c);
  auto space = enumerate_group(corpus.front().n(), Parity::all);
  Report r;
  r.table.columns = {"trial", "lambda", "exact", "bound", "cll_lhs", "cll_rhs"};
  int moment_violations = 0, cll_violations = 0;
  double worst_ratio = 0.0;
  for (std::size_t trial = 0; trial < corpus.size(); ++trial) {
    const auto inst = center(corpus[trial]);
    if (inst.max_abs() == 0.0) continue;
    for (int k = 1; k <= c.lambdas; ++k) {
      const double lambda = k / (c.lambdas + 1.0) / (2.0 * inst.max_abs());
      const auto mp = exp_moment_pair(inst, lambda, *space);
      const auto step = cll_exp_moment_step(inst, lambda, *space);
      if (exceeds(mp.exact, mp.bound)) ++moment_violations;
      if (exceeds(step.exact, step.bound)) ++cll_violations;
      worst_ratio = std::max(worst_ratio, mp.exact / mp.bound);
      r.table.add_row({trial, lambda, mp.exact, mp.bound, step.exact, step.bound});
    }
  }
  Json& s = r.summary;
  s["n"] = space->n();
  s["instances"] = corpus.size();
  s["grid_points"] = c.lambdas;
  s["moment_violations"] = moment_violations;
  s["cll_step_violations"] = cll_violations;
  s["max_moment_ratio"] = worst_ratio;
  return r;
}

Report run_tail(const ExperimentConfig& c) {
  const auto corpus = instances(c);
  auto space = enumerate_group(corpus.front().n(), Parity::all);
  Report r;
  r.table.columns = {"trial", "v", "M", "fitted_c"};
  double min_c = INFINITY;
  int below = 0;
  for (std::size_t trial = 0; trial < corpus.size(); ++trial) {
    const auto inst = center(corpus[trial]);
    const auto dist = hoeffding_exact_distribution(inst, *space);
    const double fitted = fitted_bernstein_constant(inst, dist);
    min_c = std::min(min_c, fitted);
    if (fitted < kDefaultBernsteinConstant) ++below;
    r.table.add_row({trial, inst.v(), inst.max_abs(), fitted});
  }
  Json& s = r.summary;
  s["n"] = space->n();
  s["instances"] = corpus.size();
  s["default_c"] = kDefaultBernsteinConstant;
  s["min_fitted_c"] = min_c;
  s["below_default"] = below;
  return r;
}

Report run_distribution(const ExperimentConfig& c) {
  const auto inst = instances(c).front();
  auto space = enumerate_group(inst.n(), Parity::all);
  const auto dist = hoeffding_exact_distribution(inst, *space);
  Report r;
  r.table.columns = {"value", "count", "probability"};
  for (std::size_t k = 0; k < dist.atoms.size(); ++k) {
    r.table.add_row({dist.atoms[k].first, dist.atoms[k].second, dist.probability(k)});
  }
  Json& s = r.summary;
  s["n"] = inst.n();
  s["order"] = dist.order;
  s["atoms"] = dist.atoms.size();
  s["mean"] = dist.mean();
  s["v"] = inst.v();
  s["M"] = inst.max_abs();
  s["centered"] = inst.centered();
  return r;
}

Report run_dyadic(const ExperimentConfig& c) {
  require_n(c, 1);
  if (!(c.floor > 0.0)) throw DomainError("--floor must be positive");
  Rng rng(require_seed(c));
  Report r;
  r.table.columns = {"trial", "pieces", "reconstruction_error", "band_ok", "sign_ok"};
  double worst = 0.0;
  int band_bad = 0, sign_bad = 0, recon_bad = 0;
  const double tolerance = c.n * c.floor;
  for (int trial = 0; trial < c.trials; ++trial) {
    std::vector<double> v(static_cast<std::size_t>(c.n));
    for (auto& x : v) x = rng.uniform();
    const OmegaFunction g(v);
    const double mean = integral(g);
    const auto pieces = dyadic_decompose(g, c.floor);
    std::vector<double> recon(v.size(), mean);
    bool band_ok = true, sign_ok = true;
    for (const auto& p : pieces) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = p.values[i];
        if (x == 0.0) continue;
        recon[i] += x;
        if (!(std::abs(x) > std::abs(p.scale) / 2 && std::abs(x) <= std::abs(p.scale))) band_ok = false;
        if ((x > 0) != (p.scale > 0)) sign_ok = false;
      }
    }
    double err = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) err = std::max(err, std::abs(recon[i] - v[i]));
    worst = std::max(worst, err);
    if (err > tolerance) ++recon_bad;
    if (!band_ok) ++band_bad;
    if (!sign_ok) ++sign_bad;
    r.table.add_row({trial, pieces.size(), err, band_ok, sign_ok});
  }
  Json& s = r.summary;
  s["n"] = c.n;
  s["trials"] = c.trials;
  s["floor"] = c.floor;
  s["tolerance"] = tolerance;
  s["max_reconstruction_error"] = worst;
  s["reconstruction_failures"] = recon_bad;
  s["band_violations"] = band_bad;
  s["sign_violations"] = sign_bad;
  return r;
}

OmegaFunction random_omega(int n, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = rng.uniform();
  return OmegaFunction(std::move(v));
}

Report run_deficit(const ExperimentConfig& c) {
  const auto seed = require_seed(c);
  auto space = enumerate_group(c.n, parity_or(c, Parity::all));
  Rng rng(seed);
  Report r;
  r.table.columns = {"n", "alpha", "beta", "gamma", "deficit", "term1", "term2", "ratio"};
  double worst = -INFINITY;
  for (int trial = 0; trial < c.trials; ++trial) {
    const auto f = c.density
                       ? GroupFunction::indicator(random_subset(space, density_or(c, 0.5), mix_seed(seed, trial)))
                       : random_function(space, rng);
    const auto g1 = random_omega(c.n, rng);
    const auto g2 = random_omega(c.n, rng);
    const auto d = rearrangement_deficit_report(f, g1, g2);
    if (std::isfinite(d.ratio)) worst = std::max(worst, d.ratio);
    r.table.add_row({d.n, d.alpha, d.beta, d.gamma, d.deficit, d.variance_term, d.entropy_term, d.ratio});
  }
  r.summary["group"] = space->name();
  r.summary["trials"] = c.trials;
  r.summary["max_ratio"] = worst;
  return r;
}

LevelSetPair random_levelset_pair(int n, double support, Rng& rng) {
  auto draw = [&] {
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    for (auto& x : v) {
      if (rng.bernoulli(support)) x = 0.5 + 0.5 * rng.uniform();
    }
    return OmegaFunction(std::move(v));
  };
  auto h1 = draw();
  auto h2 = draw();
  return LevelSetPair{std::move(h1), std::move(h2)};
}

Report run_levelset(const ExperimentConfig& c) {
  const auto seed = require_seed(c);
  require_n(c, 2);
  const Parity parity = parity_or(c, Parity::all);
  Rng rng(seed);
  Report r;
  r.table.columns = {"trial",       "regime",        "observed",          "alpha",     "delta1",
                     "delta2",      "high_bound",    "low_upper_log",     "low_upper_density",
                     "low_lower",   "cauchy_schwarz_cap", "std_error"};
  int high = 0, low = 0, over_cap = 0;
  auto add = [&](int trial, const LevelSetDeficit& d) {
    (d.regime == Regime::high ? high : low)++;
    if (std::abs(d.observed) > d.cauchy_schwarz_cap + 3 * d.std_error + kRelTol) ++over_cap;
    r.table.add_row({trial, d.regime == Regime::high ? "high" : "low", d.observed, d.alpha, d.delta1, d.delta2,
                     d.high_bound, d.low_upper_log, d.low_upper_density, d.low_lower, d.cauchy_schwarz_cap,
                     d.std_error});
  };
  if (c.monte_carlo) {
    // f is the indicator of a Kedlaya set, which needs no enumeration
    const auto p = KedlayaParams::standard(c.n, c.t.value_or(1));
    auto f = [p](std::span<const int> images) { return kedlaya_contains(p, images) ? 1.0 : 0.0; };
    const auto pair = random_levelset_pair(c.n, density_or(c, 0.5), rng);
    add(0, levelset_deficit_monte_carlo(f, parity, pair, c.samples, mix_seed(seed, 1)));
  } else {
    auto space = enumerate_group(c.n, parity);
    const double d = density_or(c, 0.5);
    for (int trial = 0; trial < c.trials; ++trial) {
      const auto f = GroupFunction::indicator(random_subset(space, d, mix_seed(seed, 1000 + trial)));
      add(trial, levelset_deficit(f, random_levelset_pair(c.n, d, rng)));
    }
  }
  r.summary["group"] = group_name(c.n, parity);
  r.summary["method"] = c.monte_carlo ? "monte_carlo" : "exact";
  r.summary["high_regime"] = high;
  r.summary["low_regime"] = low;
  r.summary["above_cauchy_schwarz_cap"] = over_cap;
  return r;
}

// ------------------------------------------------------------ inequality

Report run_cll(const ExperimentConfig& c) {
  require_n(c, 1);
  Rng rng(require_seed(c));
  Report r;
  r.table.columns = {"trial", "lhs", "rhs", "ratio"};
  int violations = 0;
  double worst = 0.0;
  for (int trial = 0; trial < c.trials; ++trial) {
    std::vector<OmegaFunction> fs;
    for (int i = 0; i < c.n; ++i) fs.push_back(random_omega(c.n, rng));
    const auto sides = cll_check(fs);
    if (exceeds(sides.lhs, sides.rhs)) ++violations;
    const double ratio = sides.rhs > 0 ? sides.lhs / sides.rhs : 0.0;
    worst = std::max(worst, ratio);
    r.table.add_row({trial, sides.lhs, sides.rhs, ratio});
  }
  r.summary["n"] = c.n;
  r.summary["trials"] = c.trials;
  r.summary["violations"] = violations;
  r.summary["max_ratio"] = worst;
  return r;
}

Report run_hadamard(const ExperimentConfig& c) {
  require_n(c, 1);
  Rng rng(require_seed(c));
  Report r;
  r.table.columns = {"trial", "abs_permanent", "bound", "ratio"};
  int violations = 0;
  double worst = 0.0;
  for (int trial = 0; trial < c.trials; ++trial) {
    RealMatrix m;
    m.n = c.n;
    for (int k = 0; k < c.n * c.n; ++k) m.entries.push_back(rng.normal());
    const auto sides = hadamard_permanent_check(PermanentInstance(m));
    if (exceeds(sides.lhs, sides.rhs)) ++violations;
    const double ratio = sides.rhs > 0 ? sides.lhs / sides.rhs : 0.0;
    worst = std::max(worst, ratio);
    r.table.add_row({trial, sides.lhs, sides.rhs, ratio});
  }
  r.summary["n"] = c.n;
  r.summary["trials"] = c.trials;
  r.summary["violations"] = violations;
  r.summary["max_ratio"] = worst;
  return r;
}

Rational parse_rational(std::string cell) {
  cell.erase(std::remove_if(cell.begin(), cell.end(), [](unsigned char ch) { return std::isspace(ch); }), cell.end());
  if (cell.empty()) throw DomainError("empty matrix cell");
  try {
    const auto slash = cell.find('/');
    if (slash != std::string::npos) return Rational(BigInt(cell.substr(0, slash)), BigInt(cell.substr(slash + 1)));
    const auto dot = cell.find('.');
    if (dot == std::string::npos) return Rational(BigInt(cell));
    const std::string digits = cell.substr(0, dot) + cell.substr(dot + 1);
    BigInt scale = 1;
    for (std::size_t k = dot + 1; k < cell.size(); ++k) scale *= 10;
    return Rational(BigInt(digits == "-" || digits.empty() ? "0" : digits), scale);
  } catch (const std::exception&) {
    throw DomainError("cannot parse matrix cell '" + cell + "' as a rational");
  }
}

// Same layout as the real CSV format, but cells may also be fractions "a/b".
RationalMatrix parse_rational_matrix(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) lines.push_back(line);
  }
  if (lines.empty()) throw DomainError("matrix CSV is empty");
  std::string header = lines.front();
  for (const char* prefix : {"n,", "n=", "n "}) {
    if (header.rfind(prefix, 0) == 0) header = header.substr(2);
  }
  const Rational size = parse_rational(header);
  const int n = static_cast<int>(lines.size()) - 1;
  if (size != n || n < 1) throw DomainError("matrix CSV header does not match the number of rows");
  RationalMatrix m;
  m.n = n;
  for (int r = 1; r <= n; ++r) {
    std::stringstream ls(lines[static_cast<std::size_t>(r)]);
    std::string cell;
    int cols = 0;
    while (std::getline(ls, cell, ',')) {
      m.entries.push_back(parse_rational(cell));
      ++cols;
    }
    if (cols != n) throw DomainError("matrix CSV row " + std::to_string(r) + " has " + std::to_string(cols) + " cells");
  }
  return m;
}

Report run_permanent(const ExperimentConfig& c) {
  Report r;
  Json& s = r.summary;
  if (!c.matrix_path.empty()) {
    const auto text = read_file(c.matrix_path);
    RealMatrix m;
    std::optional<RationalMatrix> q;
    if (c.rational_mode) {
      q = parse_rational_matrix(text);
      m.n = q->n;
      for (const auto& v : q->entries) m.entries.push_back(to_double(v));
    } else {
      const auto inst = parse_instance_csv(text);
      m.n = inst.n();
      m.entries.assign(inst.entries().begin(), inst.entries().end());
    }
    r.table.columns = {"method", "value"};
    r.table.add_row({"ryser", permanent(m)});
    if (m.n <= 10) r.table.add_row({"brute_force", permanent_brute_force(m)});
    s["n"] = m.n;
    s["permanent"] = permanent(m);
    if (q) {
      const auto exact = permanent(*q);
      s["permanent_exact"] = rational_json(exact);
      if (q->n <= 10) s["brute_force_agrees"] = permanent_brute_force(*q) == exact;
    }
    return r;
  }
  require_n(c, 1);
  if (c.n > 10) throw SizeError("random permanent comparison runs brute force, which is capped at n <= 10");
  Rng rng(require_seed(c));
  r.table.columns = {"trial", "ryser", "brute_force", "abs_diff", "exact_agree"};
  double worst = 0.0;
  int mismatches = 0;
  for (int trial = 0; trial < c.trials; ++trial) {
    RealMatrix m;
    RationalMatrix q;
    m.n = q.n = c.n;
    for (int k = 0; k < c.n * c.n; ++k) {
      const auto v = static_cast<int>(rng.below(7)) - 3;
      m.entries.push_back(v);
      q.entries.emplace_back(v);
    }
    const double ry = permanent(m), bf = permanent_brute_force(m);
    worst = std::max(worst, std::abs(ry - bf));
    Json agree = nullptr;
    if (c.rational_mode) {
      const bool ok = permanent(q) == permanent_brute_force(q);
      if (!ok) ++mismatches;
      agree = ok;
    }
    r.table.add_row({trial, ry, bf, std::abs(ry - bf), agree});
  }
  s["n"] = c.n;
  s["trials"] = c.trials;
  s["max_abs_diff"] = worst;
  if (c.rational_mode) s["exact_mismatches"] = mismatches;
  return r;
}

Report run_subadditivity(const ExperimentConfig& c) {
  Rng rng(require_seed(c));
  auto space = enumerate_group(c.n, parity_or(c, Parity::all));
  Report r;
  r.table.columns = {"trial", "lhs", "rhs", "margin"};
  int violations = 0;
  double min_margin = INFINITY;
  for (int trial = 0; trial < c.trials; ++trial) {
    const auto sides = subadditivity_check(random_function(space, rng));
    if (sides.lhs < sides.rhs - kRelTol) ++violations;
    min_margin = std::min(min_margin, sides.lhs - sides.rhs);
    r.table.add_row({trial, sides.lhs, sides.rhs, sides.lhs - sides.rhs});
  }
  const auto pm = subadditivity_check(GroupFunction::point_mass(space, 0));
  Json& s = r.summary;
  s["group"] = space->name();
  s["trials"] = c.trials;
  s["violations"] = violations;
  s["min_margin"] = min_margin;
  s["point_mass_margin"] = pm.lhs - pm.rhs;
  if (space->parity() == Parity::all) {
    s["point_mass_margin_formula"] = std::lgamma(c.n + 1.0) - 0.5 * c.n * std::log(static_cast<double>(c.n));
  }
  return r;
}

Report run_extremal(const ExperimentConfig& c) {
  require_n(c, 2);
  Report r;
  r.table.columns = {"kind", "beta", "t", "delta", "entropy", "direct_entropy", "abs_diff", "lemma_bound", "ratio"};
  double worst = 0.0, min_low_ratio = INFINITY, min_high_ratio = INFINITY;
  const double betas[] = {0.25, 0.5, 0.75};
  const double xs[] = {0.001, 0.005, 0.01, 0.1, 0.5, 1.0};
  for (double beta : betas) {
    for (double x : xs) {
      const double t = x * beta;
      for (int k = 1; 2 * k <= c.n; ++k) {
        const double delta = static_cast<double>(k) / c.n;
        const auto lo = extremal_entropy_low(beta, t, delta);
        const double lo_direct = entropy(two_level_low(c.n, beta, t, delta));
        const auto hi = extremal_entropy_high(beta, t, delta);
        const double hi_direct = entropy(two_level_high(c.n, beta, t, delta));
        const double lo_diff = std::abs(lo.entropy - lo_direct);
        const double hi_diff = std::abs(hi.entropy - hi_direct);
        worst = std::max({worst, lo_diff, hi_diff});
        const double lo_ratio = lo.entropy / lo.lemma_bound, hi_ratio = hi.entropy / hi.lemma_bound;
        if (x <= 0.01) min_low_ratio = std::min(min_low_ratio, lo_ratio);
        min_high_ratio = std::min(min_high_ratio, hi_ratio);
        r.table.add_row({"low", beta, t, delta, lo.entropy, lo_direct, lo_diff, lo.lemma_bound, lo_ratio});
        r.table.add_row({"high", beta, t, delta, hi.entropy, hi_direct, hi_diff, hi.lemma_bound, hi_ratio});
      }
    }
  }
  Json& s = r.summary;
  s["grid_size"] = c.n;
  s["rows"] = r.table.rows.size();
  s["max_abs_diff"] = worst;
  s["min_low_ratio_small_t"] = min_low_ratio;
  s["min_high_ratio"] = min_high_ratio;
  return r;
}

// -------------------------------------------------------------- threshold

Report run_threshold(const ExperimentConfig& c) {
  const auto t = main_theorem_conditions(c.alpha, c.beta, c.gamma, c.n);
  Report r;
  r.table.columns = {"condition", "margin", "log10_margin"};
  bool all = true;
  for (const auto& cond : t.conditions) {
    all = all && cond.log10_margin > 0.0;
    r.table.add_row({cond.name, cond.margin, cond.log10_margin});
  }
  Json& s = r.summary;
  s["n"] = c.n;
  s["alpha"] = c.alpha;
  s["beta"] = c.beta;
  s["gamma"] = c.gamma;
  s["summary_margin"] = t.summary;
  s["all_conditions_above_one"] = all;
  return r;
}

}  // namespace

Json config_json(const ExperimentConfig& c) {
  auto opt = [](const auto& o) -> Json { return o ? Json(*o) : Json(nullptr); };
  Json j = Json::object();
  j["command"] = command_name(c.command);
  j["action"] = c.action;
  j["n"] = c.n;
  j["parity"] = c.parity ? Json(parity_text(*c.parity)) : Json(nullptr);
  j["seed"] = opt(c.seed);
  j["samples"] = c.samples;
  j["trials"] = c.trials;
  j["density"] = opt(c.density);
  j["t"] = opt(c.t);
  j["T"] = c.T;
  j["basepoint"] = opt(c.basepoint);
  j["check_product_free"] = c.check_product_free;
  j["family"] = c.family;
  j["m"] = opt(c.m);
  j["monte_carlo"] = c.monte_carlo;
  j["lambdas"] = c.lambdas;
  j["floor"] = c.floor;
  j["matrix"] = c.matrix_path;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["gamma"] = c.gamma;
  j["format"] = c.format == Format::json ? "json" : "csv";
  j["rational"] = c.rational_mode;
  return j;
}

Report run_experiment(const ExperimentConfig& c) {
  Report r;
  const std::string& a = c.action;
  switch (c.command) {
    case Command::mixing: r = run_mixing(c); break;
    case Command::construct:
      if (a == "kedlaya") r = run_kedlaya(c);
      else if (a == "surplus") r = run_surplus(c);
      else if (a == "surplus-table") r = run_surplus_table(c);
      else throw DomainError("unknown construct action '" + a + "'");
      break;
    case Command::fourier:
      if (a == "decompose") r = run_decompose(c);
      else if (a == "secondterm") r = run_secondterm(c);
      else if (a == "parseval") r = run_parseval(c);
      else throw DomainError("unknown fourier action '" + a + "'");
      break;
    case Command::concentration:
      if (a == "exp-moment") r = run_exp_moment(c);
      else if (a == "tail") r = run_tail(c);
      else if (a == "distribution") r = run_distribution(c);
      else if (a == "dyadic") r = run_dyadic(c);
      else if (a == "deficit") r = run_deficit(c);
      else if (a == "levelset") r = run_levelset(c);
      else throw DomainError("unknown concentration action '" + a + "'");
      break;
    case Command::inequality:
      if (a == "cll") r = run_cll(c);
      else if (a == "hadamard") r = run_hadamard(c);
      else if (a == "permanent") r = run_permanent(c);
      else if (a == "subadditivity") r = run_subadditivity(c);
      else if (a == "extremal") r = run_extremal(c);
      else throw DomainError("unknown inequality action '" + a + "'");
      break;
    case Command::threshold: r = run_threshold(c); break;
  }
  r.command = command_name(c.command) + (a.empty() ? "" : " " + a);
  r.config = config_json(c);
  return r;
}

namespace {

struct Leaf {
  CLI::App* app;
  Command command;
  std::string action;
};

void add_core(CLI::App* s, ExperimentConfig& c, std::string& parity, std::string& format) {
  s->add_option("--n", c.n, "size of the ground set Omega");
  s->add_option("--parity", parity, "all (S_n) or even (A_n)")->check(CLI::IsMember({"all", "even"}));
  s->add_option_function<std::uint64_t>("--seed", [&c](const std::uint64_t& v) { c.seed = v; }, "random seed");
  s->add_option("--samples", c.samples, "Monte Carlo sample count");
  s->add_option("--trials", c.trials, "number of random instances")->check(CLI::NonNegativeNumber);
  s->add_option_function<double>("--density", [&c](const double& v) { c.density = v; }, "subset density");
  s->add_option("--output", c.output_path, "write the report here instead of stdout");
  s->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  s->add_flag("--rational", c.rational_mode, "exact rational arithmetic where available");
  s->add_option_function<unsigned>("--threads", [&c](const unsigned& v) { c.threads = v; }, "worker thread cap")
      ->check(CLI::PositiveNumber);
  s->add_flag("--timing", c.timing, "embed wall-clock runtime in the report");
}

void add_sets(CLI::App* s, ExperimentConfig& c) {
  s->add_option_function<int>("--t", [&c](const int& v) { c.t = v; }, "size of T");
  s->add_option("--T", c.T, "points of T, 1-based, comma separated")->delimiter(',');
  s->add_flag("--monte-carlo", c.monte_carlo, "sample instead of enumerating");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ExperimentConfig c;
  std::string parity, format = "json";
  CLI::App app{"Product mixing experiments on S_n and A_n", "permix"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  std::vector<Leaf> leaves;
  auto leaf = [&](CLI::App* parent, Command cmd, const std::string& name, const std::string& action,
                  const std::string& help) {
    auto* s = parent->add_subcommand(name, help);
    add_core(s, c, parity, format);
    leaves.push_back({s, cmd, action});
    return s;
  };

  auto* mixing = leaf(&app, Command::mixing, "mixing", "", "measure <1_X * 1_Y, 1_Z> against alpha beta gamma");
  add_sets(mixing, c);
  mixing->add_flag("--random-triple", "three independent random subsets (the default family)");
  mixing->add_option("--family", c.family, "random, kedlaya or surplus")
      ->check(CLI::IsMember({"random", "kedlaya", "surplus"}));
  mixing->add_option_function<int>("--m", [&c](const int& v) { c.m = v; }, "minimal irreducible dimension");

  auto* construct = app.add_subcommand("construct", "explicit product-free and surplus sets");
  construct->require_subcommand(1);
  auto* ked = leaf(construct, Command::construct, "kedlaya", "kedlaya", "Kedlaya's product-free set");
  add_sets(ked, c);
  ked->add_option_function<int>("--basepoint", [&c](const int& v) { c.basepoint = v; }, "basepoint, 1-based");
  ked->add_flag("--check-product-free", c.check_product_free, "verify there is no solution to xy = z");
  add_sets(leaf(construct, Command::construct, "surplus", "surplus", "the set of g with g(T) meeting T"), c);
  leaf(construct, Command::construct, "surplus-table", "surplus-table", "exact excess for every t");

  auto* fourier = app.add_subcommand("fourier", "standard-representation Fourier checks");
  fourier->require_subcommand(1);
  leaf(fourier, Command::fourier, "decompose", "decompose", "main + sigma + remainder decomposition");
  leaf(fourier, Command::fourier, "secondterm", "secondterm", "matrix vs pushforward form of the sigma term");
  leaf(fourier, Command::fourier, "parseval", "parseval", "sigma part of Parseval");

  auto* conc = app.add_subcommand("concentration", "Hoeffding statistic and deficit experiments");
  conc->require_subcommand(1);
  for (const char* name : {"exp-moment", "tail", "distribution"}) {
    auto* s = leaf(conc, Command::concentration, name, name, std::string("Hoeffding statistic: ") + name);
    s->add_option("--matrix", c.matrix_path, "CSV matrix (first line n, then n rows)");
    if (std::string(name) == "exp-moment") s->add_option("--lambdas", c.lambdas, "lambda grid size");
  }
  leaf(conc, Command::concentration, "dyadic", "dyadic", "dyadic level decomposition")
      ->add_option("--floor", c.floor, "magnitudes at or below this are dropped");
  leaf(conc, Command::concentration, "deficit", "deficit", "rearrangement deficit ratios");
  add_sets(leaf(conc, Command::concentration, "levelset", "levelset", "level-set deficit regimes"), c);

  auto* ineq = app.add_subcommand("inequality", "permutation inequalities");
  ineq->require_subcommand(1);
  leaf(ineq, Command::inequality, "cll", "cll", "functional Carlen-Lieb-Loss inequality");
  leaf(ineq, Command::inequality, "hadamard", "hadamard", "permanent Hadamard-type bound");
  leaf(ineq, Command::inequality, "permanent", "permanent", "Ryser against brute force")
      ->add_option("--matrix", c.matrix_path, "CSV matrix (first line n, then n rows)");
  leaf(ineq, Command::inequality, "subadditivity", "subadditivity", "entropy subadditivity over S_n");
  leaf(ineq, Command::inequality, "extremal", "extremal", "two-level extremal entropies");

  auto* thr = leaf(&app, Command::threshold, "threshold", "", "sufficiency margins of the mixing theorem");
  thr->add_option("--alpha", c.alpha)->required();
  thr->add_option("--beta", c.beta)->required();
  thr->add_option("--gamma", c.gamma)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  for (const auto& l : leaves) {
    if (l.app->parsed()) {
      c.command = l.command;
      c.action = l.action;
    }
  }
  if (!parity.empty()) c.parity = parity == "even" ? Parity::even : Parity::all;
  c.format = format == "csv" ? Format::csv : Format::json;
  if (c.threads) set_thread_count(*c.threads);

  try {
    const auto start = std::chrono::steady_clock::now();
    Report report = run_experiment(c);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (c.timing) {
      report.runtime_ms = ms;
      err << "runtime_ms " << format_number(ms) << "\n";
    }
    if (c.output_path.empty()) {
      emit_table(report, c.format, version(), out);
    } else {
      std::ofstream file(c.output_path, std::ios::binary);
      if (!file) throw Error("cannot open " + c.output_path + " for writing");
      emit_table(report, c.format, version(), file);
    }
  } catch (const SizeError& e) {
    err << "permix: " << e.what() << "\n";
    return 3;
  } catch (const BudgetError& e) {
    err << "permix: " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    err << "permix: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "permix: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace permix::cli
