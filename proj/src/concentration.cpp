#include "permix/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "permix/errors.hpp"
#include "permix/parallel.hpp"

namespace permix {

ConcentrationInstance::ConcentrationInstance(int n, std::vector<double> a) : n_(n), a_(std::move(a)) {
  if (n < 1) throw DomainError("matrix size must be at least 1");
  if (a_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw DomainError("matrix has " + std::to_string(a_.size()) + " entries, expected n^2");
  }
  double sq = 0.0;
  for (double x : a_) {
    if (!std::isfinite(x)) throw DomainError("matrix entries must be finite");
    max_abs_ = std::max(max_abs_, std::abs(x));
    sq += x * x;
  }
  v_ = sq / n;
}

double ConcentrationInstance::statistic(std::span<const std::uint8_t> images) const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += at(i, images[static_cast<std::size_t>(i)]);
  return s;
}

double ConcentrationInstance::statistic(std::span<const int> images) const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += at(i, images[static_cast<std::size_t>(i)]);
  return s;
}

ConcentrationInstance ConcentrationInstance::center() const {
  std::vector<double> b(a_);
  double shift = shift_;
  for (int i = 0; i < n_; ++i) {
    double row = 0.0;
    for (int j = 0; j < n_; ++j) row += at(i, j);
    row /= n_;
    shift += row;
    for (int j = 0; j < n_; ++j) b[static_cast<std::size_t>(i * n_ + j)] -= row;
  }
  ConcentrationInstance out(n_, std::move(b));
  out.centered_ = true;
  out.shift_ = shift;
  return out;
}

ConcentrationInstance center(const ConcentrationInstance& instance) { return instance.center(); }

ConcentrationInstance random_instance(int n, Rng& rng) {
  std::vector<double> a(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (auto& x : a) x = 2.0 * rng.uniform() - 1.0;
  return ConcentrationInstance(n, std::move(a));
}

ConcentrationInstance parse_instance_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw DomainError("matrix CSV is empty");
  std::string header = line;
  for (const char* prefix : {"n,", "n=", "n "}) {
    if (header.rfind(prefix, 0) == 0) header = header.substr(2);
  }
  int n = 0;
  try {
    std::size_t used = 0;
    n = std::stoi(header, &used);
    if (header.find_first_not_of(" \t", used) != std::string::npos) throw DomainError("");
  } catch (...) {
    throw DomainError("matrix CSV header must hold n, got '" + line + "'");
  }
  if (n < 1) throw DomainError("matrix CSV header must hold a positive n");
  std::vector<double> a;
  a.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    if (!next_line()) throw DomainError("matrix CSV ends after " + std::to_string(r) + " rows");
    std::istringstream row(line);
    std::string cell;
    int cols = 0;
    while (std::getline(row, cell, ',')) {
      try {
        std::size_t used = 0;
        a.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw DomainError("");
      } catch (...) {
        throw DomainError("matrix CSV cell '" + cell + "' is not a number");
      }
      ++cols;
    }
    if (cols != n) throw DomainError("matrix CSV row " + std::to_string(r + 1) + " has " + std::to_string(cols) + " cells");
  }
  return ConcentrationInstance(n, std::move(a));
}

// ---------------------------------------------------------------------------

double Distribution::mean() const {
  double s = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) s += atoms[k].first * probability(k);
  return s;
}

double Distribution::two_sided_tail(double t) const {
  std::uint64_t c = 0;
  for (const auto& [x, count] : atoms)
    if (std::abs(x) > t) c += count;
  return static_cast<double>(c) / static_cast<double>(order);
}

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

std::vector<double> statistic_values(const ConcentrationInstance& instance, const GroupSpace& space) {
  if (space.n() != instance.n()) throw DomainError("matrix size does not match the group degree");
  std::vector<double> values(space.order());
  parallel_blocks(values.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) values[r] = instance.statistic(space.images(r));
  });
  return values;
}

double mean_exp(const std::vector<double>& values, double lambda) {
  double s = 0.0;
  for (double x : values) s += std::exp(lambda * x);
  return s / static_cast<double>(values.size());
}

}  // namespace

Distribution hoeffding_exact_distribution(const ConcentrationInstance& instance, const GroupSpace& space) {
  auto values = statistic_values(instance, space);
  std::sort(values.begin(), values.end());
  Distribution d;
  d.order = values.size();
  for (double x : values) {
    if (!d.atoms.empty() && close(d.atoms.back().first, x)) {
      ++d.atoms.back().second;
    } else {
      d.atoms.emplace_back(x, 1);
    }
  }
  return d;
}

std::vector<std::uint64_t> monte_carlo_tail_counts(const ConcentrationInstance& instance, Parity parity,
                                                   std::span<const double> thresholds, std::uint64_t samples,
                                                   std::uint64_t seed) {
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  const std::size_t k = thresholds.size();
  std::vector<std::uint64_t> per_chunk(chunks * k, 0);
  parallel_blocks(chunks, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      Rng rng(mix_seed(seed, c));
      const std::uint64_t count = std::min(kChunk, samples - c * kChunk);
      for (std::uint64_t s = 0; s < count; ++s) {
        const double x = std::abs(instance.statistic(random_permutation(instance.n(), parity, rng).images()));
        for (std::size_t j = 0; j < k; ++j) per_chunk[c * k + j] += x > thresholds[j];
      }
    }
  });
  std::vector<std::uint64_t> out(k, 0);
  for (std::size_t c = 0; c < chunks; ++c)
    for (std::size_t j = 0; j < k; ++j) out[j] += per_chunk[c * k + j];
  return out;
}

double bernstein_bound(const ConcentrationInstance& instance, double t, double c) {
  if (!(t > 0.0) || !(c > 0.0)) throw DomainError("Bernstein bound needs t > 0 and c > 0");
  const double denom = instance.v() + instance.max_abs() * t;
  if (denom == 0.0) return 0.0;
  return 2.0 * std::exp(-c * t * t / denom);
}

double fitted_bernstein_constant(const ConcentrationInstance& instance, const Distribution& dist) {
  // P(|X| > t) is a step function; on each step the constraint on c is
  // tightest just below the next atom x of |X|, where P(|X| > t) = P(|X| >= x).
  std::map<double, std::uint64_t> abs_atoms;
  for (const auto& [x, count] : dist.atoms) abs_atoms[std::abs(x)] += count;
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t at_least = 0;
  for (auto it = abs_atoms.rbegin(); it != abs_atoms.rend(); ++it) {
    at_least += it->second;
    const double x = it->first;
    if (x <= 1e-12) continue;
    const double p = static_cast<double>(at_least) / static_cast<double>(dist.order);
    const double c = std::log(2.0 / p) * (instance.v() + instance.max_abs() * x) / (x * x);
    best = std::min(best, c);
  }
  return best;
}

MomentPair exp_moment_pair(const ConcentrationInstance& instance, double lambda, const GroupSpace& space) {
  if (space.parity() != Parity::all) throw DomainError("exponential moment bound is stated over S_n");
  const double two_lm = 2.0 * lambda * instance.max_abs();
  if (!(lambda > 0.0) || !(two_lm < 1.0)) throw DomainError("exponential moment bound needs 0 < 2 lambda M < 1");
  const int n = instance.n();
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += instance.at(i, j);
    if (std::abs(row) > 1e-9 * std::max(1.0, instance.max_abs() * n)) {
      throw DomainError("exponential moment bound needs zero row sums; center the matrix first");
    }
  }
  MomentPair out;
  out.exact = mean_exp(statistic_values(instance, space), lambda);
  out.bound = std::exp(2.0 * lambda * lambda * instance.v() / (1.0 - two_lm));
  return out;
}

MomentPair cll_exp_moment_step(const ConcentrationInstance& instance, double lambda, const GroupSpace& space) {
  if (space.parity() != Parity::all) throw DomainError("the CLL step is stated over S_n");
  MomentPair out;
  out.exact = mean_exp(statistic_values(instance, space), lambda);
  const int n = instance.n();
  double log_rhs = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += std::exp(2.0 * lambda * instance.at(i, j));
    log_rhs += 0.5 * std::log(row / n);
  }
  out.bound = std::exp(log_rhs);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<DyadicPiece> dyadic_decompose(const OmegaFunction& g, double floor) {
  for (double v : g.values())
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("dyadic decomposition needs values in [0, 1]");
  if (!(floor >= 0.0)) throw DomainError("dyadic floor must be nonnegative");
  const int n = g.n();
  const double mean = integral(g);

  // key: (sign, k); s = sign * 2^-k
  std::map<std::pair<int, int>, std::vector<double>> pieces;
  for (int i = 0; i < n; ++i) {
    const double d = g[static_cast<std::size_t>(i)] - mean;
    const double mag = std::abs(d);
    if (mag <= floor || mag == 0.0) continue;
    int e = 0;
    const double m = std::frexp(mag, &e);  // mag = m 2^e, m in [1/2, 1)
    const int k = (m == 0.5) ? 1 - e : -e;
    auto& vals = pieces[{d > 0 ? 1 : -1, k}];
    if (vals.empty()) vals.assign(static_cast<std::size_t>(n), 0.0);
    vals[static_cast<std::size_t>(i)] = d;
  }

  std::vector<DyadicPiece> out;
  out.reserve(pieces.size());
  for (auto& [key, vals] : pieces) {
    const auto [sign, k] = key;
    const std::size_t support = static_cast<std::size_t>(std::count_if(vals.begin(), vals.end(), [](double x) { return x != 0.0; }));
    out.push_back(DyadicPiece{sign * std::ldexp(1.0, -k), k, OmegaFunction(std::move(vals)),
                              static_cast<double>(support) / n});
  }
  std::sort(out.begin(), out.end(), [](const DyadicPiece& a, const DyadicPiece& b) { return a.scale > b.scale; });
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double support_density(const OmegaFunction& h) {
  std::size_t c = 0;
  for (double v : h.values()) c += v != 0.0;
  return static_cast<double>(c) / h.n();
}

double l2_norm(const OmegaFunction& u) { return std::sqrt(inner_product(u, u)); }

void require_unit_range(std::span<const double> values, const char* what) {
  for (double v : values)
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError(std::string(what) + " must take values in [0, 1]");
}

void fill_levelset_bounds(LevelSetDeficit& out, int n) {
  const double logn = std::log(static_cast<double>(n));
  const double dd = out.delta1 * out.delta2;
  out.regime = dd >= 1.0 / n ? Regime::high : Regime::low;
  out.high_bound = out.alpha * std::sqrt(dd) * logn / std::sqrt(static_cast<double>(n));
  out.low_upper_log = out.alpha * logn / n;
  out.low_upper_density = dd;
  out.low_lower = -out.alpha * dd;
}

}  // namespace

void LevelSetPair::validate() const {
  if (h1.n() != h2.n()) throw DomainError("level-set functions of different size");
  for (const auto* h : {&h1, &h2}) {
    for (double v : h->values()) {
      if (v != 0.0 && !(v >= 0.5 && v <= 1.0)) throw DomainError("level-set function must lie in [1/2, 1] on its support");
    }
  }
}

double LevelSetPair::delta1() const { return support_density(h1); }
double LevelSetPair::delta2() const { return support_density(h2); }

LevelSetDeficit levelset_deficit(const GroupFunction& f, const LevelSetPair& pair) {
  pair.validate();
  const int n = f.space().n();
  if (pair.h1.n() != n) throw DomainError("level-set functions do not match the group degree");
  require_unit_range(f.values(), "f");
  LevelSetDeficit out;
  out.alpha = integral(f);
  out.delta1 = pair.delta1();
  out.delta2 = pair.delta2();
  out.observed = inner_product(convolve(f, pair.h1), pair.h2) - out.alpha * integral(pair.h1) * integral(pair.h2);
  out.cauchy_schwarz_cap = l2_norm(pair.h1) * l2_norm(pair.h2);
  fill_levelset_bounds(out, n);
  return out;
}

LevelSetDeficit levelset_deficit_monte_carlo(const std::function<double(std::span<const int>)>& f, Parity parity,
                                             const LevelSetPair& pair, std::uint64_t samples, std::uint64_t seed) {
  pair.validate();
  if (samples < 2) throw DomainError("level-set Monte Carlo needs at least two samples");
  const int n = pair.h1.n();
  const double mean_product = integral(pair.h1) * integral(pair.h2);

  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  struct Sums {
    double f = 0.0, y = 0.0, y2 = 0.0;
    bool out_of_range = false;
  };
  std::vector<Sums> sums(chunks);
  parallel_blocks(chunks, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      Rng rng(mix_seed(seed, c));
      const std::uint64_t count = std::min(kChunk, samples - c * kChunk);
      for (std::uint64_t s = 0; s < count; ++s) {
        const auto p = random_permutation(n, parity, rng);
        const double fv = f(p.images());
        if (!(fv >= 0.0 && fv <= 1.0)) sums[c].out_of_range = true;
        double r = 0.0;
        for (int i = 0; i < n; ++i) r += pair.h1[static_cast<std::size_t>(i)] * pair.h2[static_cast<std::size_t>(p(i))];
        const double y = fv * (r / n - mean_product);
        sums[c].f += fv;
        sums[c].y += y;
        sums[c].y2 += y * y;
      }
    }
  });
  Sums total;
  for (const auto& s : sums) {
    if (s.out_of_range) throw DomainError("f must take values in [0, 1]");
    total.f += s.f;
    total.y += s.y;
    total.y2 += s.y2;
  }
  const double N = static_cast<double>(samples);
  LevelSetDeficit out;
  out.alpha = total.f / N;
  out.delta1 = pair.delta1();
  out.delta2 = pair.delta2();
  out.observed = total.y / N;
  const double var = std::max(0.0, (total.y2 - N * out.observed * out.observed) / (N - 1.0));
  out.std_error = std::sqrt(var / N);
  out.cauchy_schwarz_cap = l2_norm(pair.h1) * l2_norm(pair.h2);
  fill_levelset_bounds(out, n);
  return out;
}

DeficitReport rearrangement_deficit_report(const GroupFunction& f, const OmegaFunction& g1, const OmegaFunction& g2) {
  const int n = f.space().n();
  if (g1.n() != n || g2.n() != n) throw DomainError("Omega functions do not match the group degree");
  require_unit_range(f.values(), "f");
  require_unit_range(g1.values(), "g1");
  require_unit_range(g2.values(), "g2");

  DeficitReport r;
  r.n = n;
  r.alpha = integral(f);
  r.beta = integral(g1);
  r.gamma = integral(g2);
  r.deficit = -(inner_product(convolve(f, g1), g2) - r.alpha * r.beta * r.gamma);

  auto safe_entropy = [](const OmegaFunction& g) { return integral(g) > 0.0 ? entropy(g) : 0.0; };
  const double logn = std::log(static_cast<double>(n));
  const double root_n = std::sqrt(static_cast<double>(n));
  r.variance_term = r.alpha * l2_norm(g1.minus(r.beta)) * l2_norm(g2.minus(r.gamma)) * logn / root_n;
  r.entropy_term = std::sqrt(r.alpha * r.beta * r.gamma) * (std::sqrt(r.beta) + std::sqrt(r.gamma)) *
                   std::sqrt(safe_entropy(g1) * safe_entropy(g2)) * std::pow(logn, 2.5) / root_n;
  const double terms = r.variance_term + r.entropy_term;
  if (terms > 0.0) {
    r.ratio = r.deficit / terms;
  } else if (std::abs(r.deficit) <= 1e-15) {
    r.ratio = 0.0;
  } else {
    r.ratio = std::copysign(std::numeric_limits<double>::infinity(), r.deficit);
  }
  return r;
}

}  // namespace permix
