#include "permix/group.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numeric>
#include <string>

#include "permix/errors.hpp"
#include "permix/parallel.hpp"

namespace permix {

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  std::vector<char> seen(images_.size(), 0);
  for (int v : images_) {
    if (v < 0 || static_cast<std::size_t>(v) >= images_.size() || seen[static_cast<std::size_t>(v)]) {
      throw DomainError("permutation images are not a bijection of {0..n-1}");
    }
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> images(static_cast<std::size_t>(n));
  std::iota(images.begin(), images.end(), 0);
  return Permutation(std::move(images));
}

Permutation Permutation::inverse() const {
  std::vector<int> out(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) out[static_cast<std::size_t>(images_[i])] = static_cast<int>(i);
  Permutation p;
  p.images_ = std::move(out);
  return p;
}

Permutation Permutation::operator*(const Permutation& rhs) const {
  if (rhs.size() != size()) throw DomainError("composing permutations of different degree");
  std::vector<int> out(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) out[i] = images_[static_cast<std::size_t>(rhs.images_[i])];
  Permutation p;
  p.images_ = std::move(out);
  return p;
}

int parity_of(std::span<const int> images) {
  const std::size_t n = images.size();
  std::vector<char> seen(n, 0);
  std::size_t cycles = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    ++cycles;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(images[j])) seen[j] = 1;
  }
  return static_cast<int>((n - cycles) & 1U);
}

int Permutation::sign() const { return parity_of(images_) == 0 ? 1 : -1; }

int Permutation::fixed_points() const {
  int count = 0;
  for (std::size_t i = 0; i < images_.size(); ++i) count += images_[i] == static_cast<int>(i);
  return count;
}

namespace {

int parity_of_bytes(std::span<const std::uint8_t> images) {
  unsigned seen = 0;
  int cycles = 0;
  const int n = static_cast<int>(images.size());
  for (int i = 0; i < n; ++i) {
    if (seen & (1U << i)) continue;
    ++cycles;
    for (int j = i; !(seen & (1U << j)); j = images[static_cast<std::size_t>(j)]) seen |= 1U << j;
  }
  return (n - cycles) & 1;
}

}  // namespace

GroupSpace::GroupSpace(int n, Parity parity) : n_(n), parity_(parity) {
  if (n < 1 || n > kMaxEnumeratedN) throw SizeError("group degree outside [1, 12]");
  factorial_.assign(static_cast<std::size_t>(n) + 1, 1);
  for (int k = 1; k <= n; ++k) factorial_[static_cast<std::size_t>(k)] = factorial_[static_cast<std::size_t>(k) - 1] * static_cast<std::size_t>(k);
  const std::size_t full = factorial_[static_cast<std::size_t>(n)];
  order_ = (parity == Parity::even && n >= 2) ? full / 2 : full;

  elements_.reserve(order_ * static_cast<std::size_t>(n));
  std::vector<std::uint8_t> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), std::uint8_t{0});
  do {
    if (parity == Parity::all || parity_of_bytes(perm) == 0) {
      elements_.insert(elements_.end(), perm.begin(), perm.end());
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
}

std::string GroupSpace::name() const {
  return std::string(parity_ == Parity::all ? "S_" : "A_") + std::to_string(n_);
}

Permutation GroupSpace::element(std::size_t rank) const {
  auto img = images(rank);
  return Permutation(std::vector<int>(img.begin(), img.end()));
}

std::size_t GroupSpace::rank_unchecked(std::span<const std::uint8_t> img) const {
  std::size_t r = 0;
  unsigned used = 0;
  for (int i = 0; i < n_; ++i) {
    const unsigned v = img[static_cast<std::size_t>(i)];
    const auto smaller_unused = v - static_cast<unsigned>(std::popcount(used & ((1U << v) - 1U)));
    r += smaller_unused * factorial_[static_cast<std::size_t>(n_ - 1 - i)];
    used |= 1U << v;
  }
  return (parity_ == Parity::even && n_ >= 2) ? r / 2 : r;
}

std::size_t GroupSpace::rank(std::span<const std::uint8_t> img) const {
  if (static_cast<int>(img.size()) != n_) throw DomainError("permutation degree does not match " + name());
  unsigned used = 0;
  for (auto v : img) {
    if (v >= n_ || (used & (1U << v))) throw DomainError("not a permutation");
    used |= 1U << v;
  }
  if (parity_ == Parity::even && parity_of_bytes(img) != 0) {
    throw DomainError("odd permutation is not an element of " + name());
  }
  return rank_unchecked(img);
}

std::size_t GroupSpace::rank(const Permutation& p) const {
  std::vector<std::uint8_t> bytes(p.images().begin(), p.images().end());
  return rank(bytes);
}

std::size_t GroupSpace::compose(std::size_t a, std::size_t b) const {
  std::uint8_t buf[kMaxEnumeratedN];
  auto x = images(a);
  auto y = images(b);
  for (int i = 0; i < n_; ++i) buf[i] = x[y[static_cast<std::size_t>(i)]];
  return rank_unchecked({buf, static_cast<std::size_t>(n_)});
}

std::size_t GroupSpace::inverse(std::size_t a) const {
  std::uint8_t buf[kMaxEnumeratedN];
  auto x = images(a);
  for (int i = 0; i < n_; ++i) buf[x[static_cast<std::size_t>(i)]] = static_cast<std::uint8_t>(i);
  return rank_unchecked({buf, static_cast<std::size_t>(n_)});
}

SpacePtr enumerate_group(int n, Parity parity, EnumerationCaps caps) {
  if (n < 1) throw DomainError("group degree must be at least 1");
  const int cap = parity == Parity::all ? caps.symmetric : caps.alternating;
  if (n > cap || n > kMaxEnumeratedN) {
    throw SizeError("n = " + std::to_string(n) + " exceeds the enumeration cap of " +
                    std::to_string(std::min(cap, kMaxEnumeratedN)) +
                    (parity == Parity::all ? " for S_n" : " for A_n"));
  }
  return std::make_shared<const GroupSpace>(n, parity);
}

// ---------------------------------------------------------------------------

GroupFunction::GroupFunction(SpacePtr space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) throw DomainError("group function without a space");
  if (values_.size() != space_->order()) throw DomainError("group function length differs from group order");
}

GroupFunction GroupFunction::constant(SpacePtr space, double c) {
  const auto order = space->order();
  return GroupFunction(std::move(space), std::vector<double>(order, c));
}

GroupFunction GroupFunction::indicator(const GroupSubset& subset) {
  std::vector<double> v(subset.space().order(), 0.0);
  for (std::size_t r = 0; r < v.size(); ++r) v[r] = subset.contains(r) ? 1.0 : 0.0;
  return GroupFunction(subset.space_ptr(), std::move(v));
}

GroupFunction GroupFunction::point_mass(SpacePtr space, std::size_t rank) {
  std::vector<double> v(space->order(), 0.0);
  v.at(rank) = 1.0;
  return GroupFunction(std::move(space), std::move(v));
}

GroupFunction GroupFunction::minus(double c) const {
  std::vector<double> v(values_);
  for (auto& x : v) x -= c;
  return GroupFunction(space_, std::move(v));
}

OmegaFunction::OmegaFunction(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DomainError("function on an empty ground set");
}

OmegaFunction OmegaFunction::constant(int n, double c) {
  return OmegaFunction(std::vector<double>(static_cast<std::size_t>(n), c));
}

OmegaFunction OmegaFunction::indicator(int n, std::span<const int> points) {
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  for (int p : points) {
    if (p < 0 || p >= n) throw DomainError("indicator point outside Omega");
    v[static_cast<std::size_t>(p)] = 1.0;
  }
  return OmegaFunction(std::move(v));
}

OmegaFunction OmegaFunction::minus(double c) const {
  std::vector<double> v(values_);
  for (auto& x : v) x -= c;
  return OmegaFunction(std::move(v));
}

GroupSubset::GroupSubset(SpacePtr space) : space_(std::move(space)) {
  bits_.assign((space_->order() + 63) / 64, 0);
}

GroupSubset GroupSubset::from_predicate(SpacePtr space,
                                        const std::function<bool(std::span<const std::uint8_t>)>& pred) {
  GroupSubset s(space);
  for (std::size_t r = 0; r < space->order(); ++r) {
    if (pred(space->images(r))) s.insert(r);
  }
  return s;
}

GroupSubset GroupSubset::full(SpacePtr space) {
  GroupSubset s(space);
  for (std::size_t r = 0; r < s.space().order(); ++r) s.insert(r);
  return s;
}

void GroupSubset::insert(std::size_t rank) {
  auto& word = bits_.at(rank >> 6);
  const std::uint64_t bit = std::uint64_t{1} << (rank & 63);
  if (!(word & bit)) {
    word |= bit;
    ++count_;
  }
}

double GroupSubset::density() const {
  return static_cast<double>(count_) / static_cast<double>(space_->order());
}

std::vector<std::size_t> GroupSubset::members() const {
  std::vector<std::size_t> out;
  out.reserve(count_);
  for (std::size_t w = 0; w < bits_.size(); ++w) {
    for (std::uint64_t word = bits_[w]; word; word &= word - 1) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void require_same(const GroupSpace& a, const GroupSpace& b) {
  if (!a.same_as(b)) throw DomainError("functions live on different groups: " + a.name() + " vs " + b.name());
}

}  // namespace

double integral(const GroupFunction& f) { return mean(f.values()); }
double integral(const OmegaFunction& u) { return mean(u.values()); }

double inner_product(const GroupFunction& f, const GroupFunction& g) {
  require_same(f.space(), g.space());
  double s = 0.0;
  for (std::size_t r = 0; r < f.size(); ++r) s += f[r] * g[r];
  return s / static_cast<double>(f.size());
}

double inner_product(const OmegaFunction& u, const OmegaFunction& w) {
  if (u.n() != w.n()) throw DomainError("Omega functions of different size");
  double s = 0.0;
  for (std::size_t i = 0; i < u.values().size(); ++i) s += u[i] * w[i];
  return s / static_cast<double>(u.n());
}

GroupFunction convolve(const GroupFunction& f, const GroupFunction& g) {
  require_same(f.space(), g.space());
  const GroupSpace& G = f.space();
  const std::size_t order = G.order();
  const auto n = static_cast<std::size_t>(G.n());

  std::vector<std::size_t> support;
  for (std::size_t y = 0; y < order; ++y)
    if (f[y] != 0.0) support.push_back(y);

  // Inverse image arrays of the support of f, so y^-1 x costs n lookups.
  std::vector<std::uint8_t> inv(support.size() * n);
  for (std::size_t k = 0; k < support.size(); ++k) {
    auto img = G.images(support[k]);
    for (std::size_t i = 0; i < n; ++i) inv[k * n + img[i]] = static_cast<std::uint8_t>(i);
  }

  std::vector<double> out(order, 0.0);
  parallel_blocks(order, [&](std::size_t begin, std::size_t end) {
    std::uint8_t buf[kMaxEnumeratedN];
    for (std::size_t x = begin; x < end; ++x) {
      auto xi = G.images(x);
      double s = 0.0;
      for (std::size_t k = 0; k < support.size(); ++k) {
        const std::uint8_t* yinv = inv.data() + k * n;
        for (std::size_t i = 0; i < n; ++i) buf[i] = yinv[xi[i]];
        s += f[support[k]] * g[G.rank_unchecked({buf, n})];
      }
      out[x] = s / static_cast<double>(order);
    }
  });
  return GroupFunction(f.space_ptr(), std::move(out));
}

GroupFunction convolve_indicators(const GroupSubset& x, const GroupSubset& y) {
  require_same(x.space(), y.space());
  const GroupSpace& G = x.space();
  const auto xs = x.members();
  const auto ys = y.members();
  const auto n = static_cast<std::size_t>(G.n());

  // Integer counts per output rank, accumulated per block and merged; exact.
  std::vector<std::uint64_t> counts(G.order(), 0);
  std::mutex merge;
  parallel_blocks(xs.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint64_t> local(G.order(), 0);
    std::uint8_t buf[kMaxEnumeratedN];
    for (std::size_t a = begin; a < end; ++a) {
      auto xi = G.images(xs[a]);
      for (std::size_t b : ys) {
        auto yi = G.images(b);
        for (std::size_t i = 0; i < n; ++i) buf[i] = xi[yi[i]];
        ++local[G.rank_unchecked({buf, n})];
      }
    }
    std::lock_guard lock(merge);
    for (std::size_t r = 0; r < local.size(); ++r) counts[r] += local[r];
  });

  const double scale = 1.0 / static_cast<double>(G.order());
  std::vector<double> out(G.order());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = static_cast<double>(counts[r]) * scale;
  return GroupFunction(x.space_ptr(), std::move(out));
}

OmegaFunction convolve(const GroupFunction& f, const OmegaFunction& u) {
  const GroupSpace& G = f.space();
  if (u.n() != G.n()) throw DomainError("Omega function size does not match group degree");
  const auto n = static_cast<std::size_t>(G.n());
  std::vector<double> out(n, 0.0);
  // pi^-1(w) = i exactly when pi(i) = w.
  for (std::size_t r = 0; r < G.order(); ++r) {
    const double fr = f[r];
    if (fr == 0.0) continue;
    auto img = G.images(r);
    for (std::size_t i = 0; i < n; ++i) out[img[i]] += fr * u[i];
  }
  for (auto& v : out) v /= static_cast<double>(G.order());
  return OmegaFunction(std::move(out));
}

OmegaFunction pushforward(const GroupFunction& f, int i) {
  const GroupSpace& G = f.space();
  if (i < 0 || i >= G.n()) throw DomainError("pushforward index " + std::to_string(i) + " outside Omega");
  const auto n = static_cast<std::size_t>(G.n());
  std::vector<double> out(n, 0.0);
  for (std::size_t r = 0; r < G.order(); ++r) out[G.images(r)[static_cast<std::size_t>(i)]] += f[r];
  const double scale = static_cast<double>(n) / static_cast<double>(G.order());
  for (auto& v : out) v *= scale;
  return OmegaFunction(std::move(out));
}

double entropy(std::span<const double> values) {
  if (values.empty()) throw DomainError("entropy of an empty function");
  double total = 0.0;
  for (double v : values) {
    if (v < 0.0) throw DomainError("entropy requires a nonnegative function");
    total += v;
  }
  const double a = total / static_cast<double>(values.size());
  if (!(a > 0.0)) throw DomainError("entropy requires a positive integral");
  double s = 0.0;
  for (double v : values) {
    if (v == 0.0) continue;
    const double q = v / a;
    s += q * std::log(q);
  }
  return std::max(0.0, s / static_cast<double>(values.size()));
}

double entropy(const GroupFunction& f) { return entropy(f.values()); }
double entropy(const OmegaFunction& u) { return entropy(u.values()); }

GroupSubset random_subset(SpacePtr space, double density, std::uint64_t seed) {
  if (!(density >= 0.0 && density <= 1.0)) throw DomainError("subset density must lie in [0, 1]");
  GroupSubset s(space);
  Rng rng(seed);
  for (std::size_t r = 0; r < space->order(); ++r) {
    if (rng.uniform() < density) s.insert(r);
  }
  return s;
}

Permutation random_permutation(int n, Parity parity, Rng& rng) {
  if (n < 1) throw DomainError("permutation degree must be at least 1");
  std::vector<int> img(static_cast<std::size_t>(n));
  for (;;) {
    std::iota(img.begin(), img.end(), 0);
    for (std::size_t i = img.size() - 1; i > 0; --i) {
      std::swap(img[i], img[rng.below(i + 1)]);
    }
    if (parity == Parity::all || parity_of(img) == 0) break;
  }
  return Permutation(std::move(img));
}

Permutation random_permutation(const GroupSpace& space, std::uint64_t seed) {
  Rng rng(seed);
  return random_permutation(space.n(), space.parity(), rng);
}

GroupFunction random_function(SpacePtr space, Rng& rng) {
  std::vector<double> v(space->order());
  for (auto& x : v) x = rng.uniform();
  return GroupFunction(std::move(space), std::move(v));
}

}  // namespace permix
