#include "permix/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>

#include "permix/errors.hpp"
#include "permix/parallel.hpp"

namespace permix {

double threshold_margin(double alpha, double beta, double gamma, int n) {
  if (n < 2) return 0.0;
  const double logn = std::log(static_cast<double>(n));
  return std::min({alpha * beta, alpha * gamma, beta * gamma}) * n / std::pow(logn, 7.0);
}

namespace {

void fill_bounds(MixingReport& r) {
  r.main = r.alpha * r.beta * r.gamma;
  r.gowers_bound = r.m > 0 ? std::sqrt(r.main / r.m) : 0.0;
  r.threshold_margin = threshold_margin(r.alpha, r.beta, r.gamma, r.n);
  r.excess = r.main > 0.0 ? r.total / r.main : 0.0;
}

// Fisher-Yates on img restricted to positions [from, img.size()).
void shuffle_tail(Rng& rng, std::vector<int>& v, std::size_t from) {
  for (std::size_t i = v.size(); i > from + 1; --i) {
    const std::size_t j = from + rng.below(i - from);
    std::swap(v[i - 1], v[j]);
  }
}

// Picks the first k entries of v as a uniform random ordered sample.
void partial_shuffle(Rng& rng, std::vector<int>& v, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(v.size() - i);
    std::swap(v[i], v[j]);
  }
}

// Two points whose images can be swapped without changing membership, used to
// map odd members bijectively onto even ones. Empty when fewer than two exist.
std::optional<std::pair<int, int>> free_pair(int n, const std::vector<char>& constrained) {
  std::vector<int> free;
  for (int i = 0; i < n && free.size() < 2; ++i)
    if (!constrained[static_cast<std::size_t>(i)]) free.push_back(i);
  if (free.size() < 2) return std::nullopt;
  return std::make_pair(free[0], free[1]);
}

// Wraps an S_n sampler so that it produces uniform members of the set in A_n.
std::function<void(Rng&, std::vector<int>&)> with_parity(
    std::function<void(Rng&, std::vector<int>&)> base, Parity parity,
    std::optional<std::pair<int, int>> swap_points) {
  if (parity == Parity::all) return base;
  return [base = std::move(base), swap_points](Rng& rng, std::vector<int>& img) {
    for (;;) {
      base(rng, img);
      if (parity_of(img) == 0) return;
      if (swap_points) {
        std::swap(img[static_cast<std::size_t>(swap_points->first)], img[static_cast<std::size_t>(swap_points->second)]);
        return;
      }
    }
  };
}

}  // namespace

MixingReport mixing_exact(const GroupSubset& x, const GroupSubset& y, const GroupSubset& z, int m,
                          std::uint64_t pair_budget) {
  const GroupSpace& G = x.space();
  if (!G.same_as(y.space()) || !G.same_as(z.space())) throw DomainError("mixing_exact: subsets of different groups");
  const double pairs = static_cast<double>(x.size()) * static_cast<double>(y.size());
  if (pairs > static_cast<double>(pair_budget)) {
    throw BudgetError("exact mixing needs " + std::to_string(static_cast<std::uint64_t>(pairs)) +
                      " products, over the budget of " + std::to_string(pair_budget) + "; use Monte Carlo");
  }
  MixingReport r;
  r.method = Method::exact;
  r.n = G.n();
  r.m = m;
  r.alpha = x.density();
  r.beta = y.density();
  r.gamma = z.density();
  r.solutions = count_solutions(x, y, z);
  const double order = static_cast<double>(G.order());
  r.total = static_cast<double>(r.solutions) / (order * order);
  fill_bounds(r);
  return r;
}

MembershipOracle universal_oracle(int n, Parity parity) {
  MembershipOracle o;
  o.name = "universal";
  o.contains = [](std::span<const int>) { return true; };
  o.sample = [n, parity](Rng& rng, std::vector<int>& img) {
    const auto p = random_permutation(n, parity, rng);
    img.assign(p.images().begin(), p.images().end());
  };
  o.density = 1.0;
  return o;
}

MembershipOracle kedlaya_oracle(const KedlayaParams& params, Parity parity) {
  params.validate();
  const int n = params.n;
  const int t = params.t();
  std::vector<char> in_t(static_cast<std::size_t>(n), 0);
  for (int p : params.T) in_t[static_cast<std::size_t>(p)] = 1;
  std::vector<int> complement, free_domain;
  for (int i = 0; i < n; ++i) {
    if (!in_t[static_cast<std::size_t>(i)]) complement.push_back(i);
    if (!in_t[static_cast<std::size_t>(i)] && i != params.basepoint) free_domain.push_back(i);
  }

  MembershipOracle o;
  o.name = "kedlaya";
  o.contains = [params](std::span<const int> img) { return kedlaya_contains(params, img); };

  // pi(T) is a uniform injection into T^c, pi(b) uniform in T, the rest uniform.
  auto base = [params, complement, free_domain, n, t](Rng& rng, std::vector<int>& img) {
    img.assign(static_cast<std::size_t>(n), -1);
    std::vector<int> pool = complement;
    partial_shuffle(rng, pool, static_cast<std::size_t>(t));
    for (int k = 0; k < t; ++k) img[static_cast<std::size_t>(params.T[static_cast<std::size_t>(k)])] = pool[static_cast<std::size_t>(k)];
    const int b_image = params.T[rng.below(static_cast<std::uint64_t>(t))];
    img[static_cast<std::size_t>(params.basepoint)] = b_image;
    std::vector<int> rest(pool.begin() + t, pool.end());
    for (int p : params.T)
      if (p != b_image) rest.push_back(p);
    shuffle_tail(rng, rest, 0);
    for (std::size_t k = 0; k < free_domain.size(); ++k) img[static_cast<std::size_t>(free_domain[k])] = rest[k];
  };
  std::vector<char> constrained = in_t;
  constrained[static_cast<std::size_t>(params.basepoint)] = 1;
  o.sample = with_parity(base, parity, free_pair(n, constrained));

  // Swapping two unconstrained images pairs even and odd members, so the
  // A_n density equals the S_n density whenever n - t - 1 >= 2.
  if (parity == Parity::all || n - t - 1 >= 2) o.density = kedlaya_density_formula(n, t).value;
  return o;
}

MembershipOracle surplus_oracle(const SurplusParams& params, Parity parity) {
  params.validate();
  const int n = params.n;
  const int t = params.t();
  std::vector<char> in_t(static_cast<std::size_t>(n), 0);
  for (int p : params.T) in_t[static_cast<std::size_t>(p)] = 1;
  std::vector<int> outside;
  for (int i = 0; i < n; ++i)
    if (!in_t[static_cast<std::size_t>(i)]) outside.push_back(i);

  MembershipOracle o;
  o.name = "surplus";
  o.contains = [params](std::span<const int> img) { return surplus_contains(params, img); };

  // Draw pi(T) by rejection until it meets T, then extend uniformly.
  auto base = [params, in_t, outside, n, t](Rng& rng, std::vector<int>& img) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    for (;;) {
      partial_shuffle(rng, pool, static_cast<std::size_t>(t));
      bool meets = false;
      for (int k = 0; k < t; ++k) meets = meets || in_t[static_cast<std::size_t>(pool[static_cast<std::size_t>(k)])];
      if (meets) break;
    }
    img.assign(static_cast<std::size_t>(n), -1);
    for (int k = 0; k < t; ++k) img[static_cast<std::size_t>(params.T[static_cast<std::size_t>(k)])] = pool[static_cast<std::size_t>(k)];
    shuffle_tail(rng, pool, static_cast<std::size_t>(t));
    for (std::size_t k = 0; k < outside.size(); ++k) img[static_cast<std::size_t>(outside[k])] = pool[static_cast<std::size_t>(t) + k];
  };
  o.sample = with_parity(base, parity, free_pair(n, in_t));
  if (parity == Parity::all || n - t >= 2) o.density = to_double(surplus_density_formula(n, t));
  return o;
}

MembershipOracle subset_oracle(const GroupSubset& subset) {
  MembershipOracle o;
  o.name = "subset";
  o.contains = [subset](std::span<const int> img) {
    std::uint8_t buf[kMaxEnumeratedN];
    for (std::size_t i = 0; i < img.size(); ++i) buf[i] = static_cast<std::uint8_t>(img[i]);
    return subset.contains(subset.space().rank_unchecked({buf, img.size()}));
  };
  o.density = subset.density();
  return o;
}

namespace {

struct ChunkResult {
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  std::uint64_t x_attempts = 0, x_accepted = 0;
  std::uint64_t y_attempts = 0, y_accepted = 0;
  std::uint64_t z_probes = 0, z_hits = 0;
};

constexpr std::uint64_t kChunk = 4096;
constexpr std::uint64_t kMinAttemptsForRateCheck = 2'000'000;
constexpr double kMinAcceptance = 1e-6;

void draw(const MembershipOracle& o, int n, Parity parity, Rng& rng, std::vector<int>& img,
          std::uint64_t& attempts, std::uint64_t& accepted) {
  if (o.sample) {
    o.sample(rng, img);
    ++attempts;
    ++accepted;
    return;
  }
  for (;;) {
    const auto p = random_permutation(n, parity, rng);
    ++attempts;
    if (o.contains(p.images())) {
      img.assign(p.images().begin(), p.images().end());
      ++accepted;
      return;
    }
    if (attempts >= kMinAttemptsForRateCheck &&
        static_cast<double>(accepted) < kMinAcceptance * static_cast<double>(attempts)) {
      throw DomainError("rejection sampler for '" + o.name + "' accepts fewer than 1e-6 of draws");
    }
  }
}

}  // namespace

MixingReport mixing_monte_carlo(const MembershipOracle& x, const MembershipOracle& y,
                                const MembershipOracle& z, int n, Parity parity,
                                std::uint64_t samples, std::uint64_t seed, int m) {
  if (samples == 0) throw DomainError("Monte Carlo needs at least one sample");
  if (n < 1) throw DomainError("Monte Carlo needs n >= 1");
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<ChunkResult> results(chunks);
  std::mutex error_lock;
  std::exception_ptr error;

  parallel_blocks(chunks, [&](std::size_t begin, std::size_t end) {
    try {
      std::vector<int> xi, yi, prod(static_cast<std::size_t>(n));
      for (std::size_t c = begin; c < end; ++c) {
        Rng rng(mix_seed(seed, c));
        ChunkResult& res = results[c];
        const std::uint64_t count = std::min(kChunk, samples - c * kChunk);
        for (std::uint64_t s = 0; s < count; ++s) {
          draw(x, n, parity, rng, xi, res.x_attempts, res.x_accepted);
          draw(y, n, parity, rng, yi, res.y_attempts, res.y_accepted);
          for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = xi[static_cast<std::size_t>(yi[i])];
          res.hits += z.contains(prod);
          if (!z.density) {
            const auto p = random_permutation(n, parity, rng);
            ++res.z_probes;
            res.z_hits += z.contains(p.images());
          }
        }
        res.samples = count;
      }
    } catch (...) {
      std::lock_guard lock(error_lock);
      if (!error) error = std::current_exception();
    }
  });
  if (error) std::rethrow_exception(error);

  ChunkResult sum;
  for (const auto& r : results) {
    sum.hits += r.hits;
    sum.samples += r.samples;
    sum.x_attempts += r.x_attempts;
    sum.x_accepted += r.x_accepted;
    sum.y_attempts += r.y_attempts;
    sum.y_accepted += r.y_accepted;
    sum.z_probes += r.z_probes;
    sum.z_hits += r.z_hits;
  }

  auto rate = [](std::uint64_t a, std::uint64_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; };
  MixingReport r;
  r.method = Method::monte_carlo;
  r.n = n;
  r.m = m;
  r.samples = sum.samples;
  r.solutions = sum.hits;
  r.alpha = x.density.value_or(rate(sum.x_accepted, sum.x_attempts));
  r.beta = y.density.value_or(rate(sum.y_accepted, sum.y_attempts));
  r.gamma = z.density.value_or(rate(sum.z_hits, sum.z_probes));
  const double p = rate(sum.hits, sum.samples);
  const double se_p = std::sqrt(p * (1.0 - p) / static_cast<double>(sum.samples));
  r.total = r.alpha * r.beta * p;
  r.std_error = r.alpha * r.beta * se_p;
  fill_bounds(r);
  if (r.gamma > 0.0) {
    r.excess = p / r.gamma;
    r.excess_ci_low = (p - 1.96 * se_p) / r.gamma;
    r.excess_ci_high = (p + 1.96 * se_p) / r.gamma;
  }
  return r;
}

ProductFreeResult product_free_check(const GroupSubset& x, std::uint64_t pair_budget) {
  const double pairs = static_cast<double>(x.size()) * static_cast<double>(x.size());
  if (pairs > static_cast<double>(pair_budget)) {
    throw BudgetError("product-free check needs " + std::to_string(static_cast<std::uint64_t>(pairs)) +
                      " products, over the budget of " + std::to_string(pair_budget));
  }
  const GroupSpace& G = x.space();
  const auto xs = x.members();
  const auto n = static_cast<std::size_t>(G.n());
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  // Each block records its first witness; the earliest block wins, which is
  // the first witness in rank order regardless of blocking.
  std::vector<std::pair<std::size_t, std::array<std::size_t, 3>>> found;
  std::mutex lock;
  parallel_blocks(xs.size(), [&](std::size_t begin, std::size_t end) {
    std::uint8_t buf[kMaxEnumeratedN];
    for (std::size_t a = begin; a < end; ++a) {
      auto xi = G.images(xs[a]);
      for (std::size_t b : xs) {
        auto yi = G.images(b);
        for (std::size_t i = 0; i < n; ++i) buf[i] = xi[yi[i]];
        const std::size_t prod = G.rank_unchecked({buf, n});
        if (x.contains(prod)) {
          std::lock_guard guard(lock);
          found.push_back({a, {xs[a], b, prod}});
          return;
        }
      }
    }
  });

  ProductFreeResult out;
  std::size_t best = kNone;
  for (const auto& [index, triple] : found) {
    if (index < best) {
      best = index;
      out.witness = triple;
    }
  }
  out.product_free = !out.witness.has_value();
  return out;
}

ThresholdReport main_theorem_conditions(double alpha, double beta, double gamma, int n) {
  auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!in_unit(alpha) || !in_unit(beta) || !in_unit(gamma)) throw DomainError("densities must lie in (0, 1]");
  if (n < 3) throw DomainError("threshold conditions need n >= 3");

  const double ln_n = std::log(static_cast<double>(n));
  const double ln_logn = std::log(ln_n);
  const double la = std::log(alpha), lb = std::log(beta), lg = std::log(gamma);
  const double half_ln_n = 0.5 * ln_n;

  // Natural-log margins of alpha beta gamma over each error term.
  const std::array<std::pair<const char*, double>, 5> terms = {{
      {"nonstandard_irreducibles", 0.5 * (la + lb + lg) + ln_n},
      {"variance", 0.5 * (lb + lg) + half_ln_n - ln_logn},
      {"entropy_beta", 0.5 * (la + lg) + half_ln_n - 3.5 * ln_logn},
      {"entropy_gamma", 0.5 * (la + lb) + half_ln_n - 3.5 * ln_logn},
      {"polynomial_floor", la + lb + lg + 98.0 * ln_n},
  }};
  ThresholdReport rep;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    rep.conditions[k].name = terms[k].first;
    rep.conditions[k].margin = std::exp(terms[k].second);
    rep.conditions[k].log10_margin = terms[k].second / std::log(10.0);
  }
  rep.summary = threshold_margin(alpha, beta, gamma, n);
  return rep;
}

}  // namespace permix
