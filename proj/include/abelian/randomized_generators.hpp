#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "abelian/chain.hpp"
#include "abelian/errors.hpp"
#include "abelian/monomial_group.hpp"
#include "abelian/number_theory.hpp"
#include "abelian/oracle.hpp"

namespace abelian {

/// A subgroup G_r = <a_1..a_r> known only through a chain prefix. Its elements are never
/// enumerated; |G_r| = k_1...k_r and uniform sampling is exact.
using SubgroupHandle = GeneratorChain;

struct SizeEstimate {
  std::uint64_t q = 1;
  std::uint64_t samples_used = 0;
};

/// Sizes of the two sides of a collision search inside a subgroup of order h:
/// `distinct` enumerated elements against `uniform` independent samples. A uniform sample
/// misses the distinct set with probability 1 - distinct/h, so
///   distinct * uniform >= h ln(1/delta)
/// bounds the miss probability by delta. The split balances enumeration (one product per
/// element) against sampling (about `sample_cost` products per element).
struct SamplePlan {
  std::uint64_t distinct = 1;
  std::uint64_t uniform = 1;
};

inline SamplePlan plan_collision_search(std::uint64_t subgroup_order, double sample_cost, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ContractError("delta must lie in (0, 1)");
  const double h = static_cast<double>(subgroup_order);
  const double need = h * std::log(1.0 / delta);
  SamplePlan plan;
  double s1 = std::ceil(std::sqrt(need * std::max(1.0, sample_cost)));
  if (s1 >= h) {
    plan.distinct = subgroup_order;
    plan.uniform = 1;
    return plan;
  }
  plan.distinct = static_cast<std::uint64_t>(s1);
  plan.uniform = static_cast<std::uint64_t>(std::ceil(need / s1));
  return plan;
}

/// Rough product cost of one uniform sample from the subgroup.
inline double sample_cost(const SubgroupHandle& h) {
  double c = 1.0;
  for (auto k : h.orders) c += std::log2(static_cast<double>(k));
  return c;
}

template <class O>
struct SubgroupSample {
  Element element;
  std::vector<std::uint64_t> exponents;
};

/// Uniform element of <handle> together with the exponent vector that produced it.
template <GroupOracleType O>
SubgroupSample<O> sample_subgroup(const SubgroupHandle& handle, O& oracle, Rng& rng) {
  SubgroupSample<O> out;
  out.exponents.resize(handle.length());
  for (std::size_t i = 0; i < handle.length(); ++i) {
    std::uniform_int_distribution<std::uint64_t> pick(0, handle.orders[i] - 1);
    out.exponents[i] = pick(rng);
  }
  out.element = evaluate(oracle, handle, out.exponents);
  return out;
}

namespace detail {

/// Walks start * h for h in <handle>, exponent vectors in mixed-radix order (first digit
/// fastest). suffix_[i] = start * prod_{j >= i} a_j^{d_j}; each step costs one product.
template <GroupOracleType O>
class CosetEnumerator {
 public:
  CosetEnumerator(const SubgroupHandle& handle, Element start)
      : handle_(handle), digits_(handle.length(), 0), suffix_(handle.length() + 1, start) {}

  Element current() const { return suffix_[0]; }

  bool next(O& oracle) {
    std::size_t i = 0;
    while (i < digits_.size() && digits_[i] + 1 >= handle_.orders[i]) ++i;
    if (i == digits_.size()) return false;
    ++digits_[i];
    std::fill(digits_.begin(), digits_.begin() + static_cast<std::ptrdiff_t>(i), 0);
    suffix_[i] = oracle.op(suffix_[i], handle_.generators[i]);
    std::fill(suffix_.begin(), suffix_.begin() + static_cast<std::ptrdiff_t>(i), suffix_[i]);
    return true;
  }

 private:
  const SubgroupHandle& handle_;
  std::vector<std::uint64_t> digits_;
  std::vector<Element> suffix_;
};

inline std::vector<std::uint64_t> mixed_radix_digits(std::uint64_t index, const std::vector<std::uint64_t>& radices) {
  std::vector<std::uint64_t> d(radices.size());
  for (std::size_t i = 0; i < radices.size(); ++i) {
    d[i] = index % radices[i];
    index /= radices[i];
  }
  return d;
}

inline bool is_known_member(Element a, const SubgroupHandle& h) {
  return a == h.identity || std::find(h.generators.begin(), h.generators.end(), a) != h.generators.end();
}

}  // namespace detail

/// Decides a in <handle> by colliding a*H (distinct enumeration) with uniform samples of H.
/// A collision a*h = h' certifies membership, and no collision is possible when a is not in H,
/// so `false` is only wrong (with probability <= delta) when a is in H.
///
/// Sample sizes come from min(|H|, budget_n); the failure bound depends only on |H|.
template <GroupOracleType O>
bool membership_test(Element a, const SubgroupHandle& handle, O& oracle, Rng& rng, std::uint64_t budget_n,
                     double delta) {
  if (detail::is_known_member(a, handle)) return true;
  const std::uint64_t h = std::min(handle.order(), std::max<std::uint64_t>(budget_n, 1));
  const SamplePlan plan = plan_collision_search(h, sample_cost(handle), delta);

  std::unordered_set<std::uint64_t> coset;
  coset.reserve(plan.distinct * 2);
  detail::CosetEnumerator<O> walk(handle, a);
  for (std::uint64_t i = 0; i < plan.distinct; ++i) {
    if (i > 0 && !walk.next(oracle)) break;
    const Element x = walk.current();
    if (x == handle.identity) return true;  // a*h = e
    coset.insert(x.label);
  }
  for (std::uint64_t i = 0; i < plan.uniform; ++i) {
    if (coset.contains(sample_subgroup(handle, oracle, rng).element.label)) return true;
  }
  return false;
}

/// Uniform draws from G until one tests outside <handle>; at most ceil(log2(1/delta)) + 1 draws.
template <GroupOracleType O>
Element find_outside(const SubgroupHandle& handle, O& oracle, Rng& rng, std::uint64_t budget_n, double delta) {
  const auto draws = static_cast<unsigned>(std::ceil(std::log2(1.0 / delta))) + 1;
  for (unsigned d = 0; d < draws; ++d) {
    const Element x = oracle.random_element(rng);
    if (!membership_test(x, handle, oracle, rng, budget_n, delta)) return x;
  }
  throw RandomizedFailure("find_outside: every draw tested inside the subgroup");
}

namespace detail {

/// Order of a, given a^bound = e.
template <GroupOracleType O>
std::uint64_t order_dividing(O& oracle, Element a, std::uint64_t bound, Element e) {
  std::uint64_t d = bound;
  for (auto p : prime_divisors(bound)) {
    while (d % p == 0 && pow(oracle, a, d / p, e) == e) d /= p;
  }
  return d;
}

/// Smallest k with a^k in <handle>, assuming a is not in it and a^bound = e. Membership tests
/// are sized by budget_n (an upper bound on |G|), never by bound: in the PS model bound is only
/// a multiple of ord(a) and can be far below |<handle>|.
template <GroupOracleType O>
std::uint64_t min_exponent(Element a, const SubgroupHandle& handle, O& oracle, Rng& rng, std::uint64_t bound,
                           std::uint64_t budget_n, double delta) {
  const Element e = handle.identity;
  std::uint64_t m = order_dividing(oracle, a, bound, e);
  for (auto p : prime_divisors(m)) {
    while (m % p == 0 && m / p > 1) {
      const Element c = pow(oracle, a, m / p, e);
      const bool inside = is_known_member(c, handle) || membership_test(c, handle, oracle, rng, budget_n, delta);
      if (!inside) break;
      m /= p;
    }
  }
  return m;
}

}  // namespace detail

/// Smallest k >= 2 with a^k in <handle>. `n` must satisfy a^n = e (FS: |G|; PS: a bound
/// from order_bound_ps). The exact order of a is found first by comparisons with e alone;
/// membership tests are spent only on the descent below it.
template <GroupOracleType O>
std::uint64_t find_min_exponent(Element a, const SubgroupHandle& handle, O& oracle, Rng& rng, std::uint64_t n,
                                double delta, std::uint64_t budget_n = 0) {
  if (budget_n == 0) budget_n = n;
  const Element e = handle.identity;
  if (n == 0 || pow(oracle, a, n, e) != e) throw ContractError("find_min_exponent: a^n is not the identity");
  if (membership_test(a, handle, oracle, rng, budget_n, delta))
    throw ContractError("find_min_exponent: element already lies in the subgroup");
  return detail::min_exponent(a, handle, oracle, rng, n, budget_n, delta);
}

/// Exponents lambda (0 <= lambda_j < k_j) with b = a_1^{lambda_1}..a_r^{lambda_r}, by colliding
/// enumerated elements h_alpha with b*h_beta for uniform h_beta; then lambda = alpha - beta
/// reduced in Gamma. The result is checked against the oracle before returning.
template <GroupOracleType O>
std::vector<std::uint64_t> find_exponents(Element b, const SubgroupHandle& handle, O& oracle, Rng& rng,
                                          std::uint64_t budget_n, double delta) {
  const std::size_t r = handle.length();
  if (b == handle.identity) return std::vector<std::uint64_t>(r, 0);
  if (r == 0) throw ContractError("find_exponents: element is not in the trivial subgroup");
  const Presentation pres = to_presentation(handle);

  const std::uint64_t h = std::min(handle.order(), std::max<std::uint64_t>(budget_n, 1));
  const SamplePlan plan = plan_collision_search(h, sample_cost(handle) + 1.0, delta);

  std::unordered_map<std::uint64_t, std::uint64_t> known;  // label -> mixed-radix index
  known.reserve(plan.distinct * 2);
  std::optional<std::uint64_t> direct;
  detail::CosetEnumerator<O> walk(handle, handle.identity);
  for (std::uint64_t i = 0; i < plan.distinct; ++i) {
    if (i > 0 && !walk.next(oracle)) break;
    known.emplace(walk.current().label, i);
    if (walk.current() == b) {
      direct = i;
      break;
    }
  }

  std::optional<std::vector<std::uint64_t>> lambda;
  if (direct) {
    lambda = detail::mixed_radix_digits(*direct, handle.orders);
  } else {
    for (std::uint64_t i = 0; i < plan.uniform && !lambda; ++i) {
      auto s = sample_subgroup(handle, oracle, rng);
      const Element c = oracle.op(b, s.element);
      auto it = known.find(c.label);
      if (it == known.end()) continue;
      const auto alpha = detail::mixed_radix_digits(it->second, handle.orders);
      std::vector<std::int64_t> diff(r);
      for (std::size_t j = 0; j < r; ++j)
        diff[j] = static_cast<std::int64_t>(alpha[j]) - static_cast<std::int64_t>(s.exponents[j]);
      lambda = reduce(pres, diff).exponents;
    }
  }
  if (!lambda) throw RandomizedFailure("find_exponents: no collision within budget");
  if (evaluate(oracle, handle, *lambda) != b) throw RandomizedFailure("find_exponents: representation check failed");
  return *lambda;
}

/// Birthday-paradox size estimate: runs of uniform draws until the first repeat; m_i counts the
/// distinct elements of run i. c runs give n' = max m_i; then ceil(c log2 n') runs give
/// m = max m_i and q = m^2. The second phase never uses fewer than log2(1/delta) runs: on tiny
/// groups c log2 n' can be 0 or 1, and a single short run would leave q < |G| with constant
/// probability. The default delta = 1/2 keeps the plain c log2 n' schedule.
template <GroupOracleType O>
SizeEstimate estimate_size(O& oracle, Rng& rng, double delta = 0.5) {
  if (!(delta > 0.0 && delta < 1.0)) throw ContractError("estimate_size: delta must lie in (0, 1)");
  constexpr unsigned kRuns = 4;
  constexpr std::uint64_t kSampleCap = 1'000'000'000;
  SizeEstimate est;
  std::unordered_set<std::uint64_t> seen;
  auto run = [&]() -> std::uint64_t {
    seen.clear();
    while (true) {
      if (++est.samples_used > kSampleCap) throw RandomizedFailure("estimate_size: runaway sampling");
      if (!seen.insert(oracle.random_element(rng).label).second) return seen.size();
    }
  };
  std::uint64_t first = 0;
  for (unsigned i = 0; i < kRuns; ++i) first = std::max(first, run());
  const auto floor_runs = static_cast<std::uint64_t>(std::ceil(std::log2(1.0 / delta)));
  const auto second_runs = std::max<std::uint64_t>(
      std::max<std::uint64_t>(1, floor_runs),
      static_cast<std::uint64_t>(std::ceil(kRuns * std::log2(static_cast<double>(first)))));
  std::uint64_t m = 0;
  for (std::uint64_t i = 0; i < second_runs; ++i) m = std::max(m, run());
  est.q = checked_mul(m, m);
  return est;
}

/// w >= 1 with a^w = e, from a collision a^{j1} = a^{j2} among exponents drawn from [1, 2q].
/// The certificate a^w * a = a is checked before returning; no identity is needed.
template <GroupOracleType O>
std::uint64_t order_bound_ps(Element a, O& oracle, Rng& rng, std::uint64_t q, double delta) {
  if (q == 0) throw ContractError("order_bound_ps: q must be positive");
  const std::uint64_t top = checked_mul(2, q);
  const auto draws = static_cast<std::uint64_t>(std::ceil(std::sqrt(2.0 * static_cast<double>(top) * std::log(1.0 / delta))));
  // Exponents are distinct; once the draw count reaches 2q every j is tried, and pigeonhole
  // guarantees a collision whenever ord(a) <= q.
  const bool sweep_all = draws >= top;
  std::uniform_int_distribution<std::uint64_t> pick(1, top);
  std::unordered_set<std::uint64_t> tried;
  std::unordered_map<std::uint64_t, std::uint64_t> hit;  // label of a^j -> j
  for (std::uint64_t i = 0; i < (sweep_all ? top : draws); ++i) {
    std::uint64_t j = i + 1;
    if (!sweep_all)
      do j = pick(rng);
      while (!tried.insert(j).second);
    const Element x = pow(oracle, a, j, Element{});
    auto [it, fresh] = hit.emplace(x.label, j);
    if (fresh) continue;
    const std::uint64_t w = j > it->second ? j - it->second : it->second - j;
    const Element aw = pow(oracle, a, w, Element{});
    if (oracle.op(aw, a) != a) throw InternalInconsistencyError("order_bound_ps: collision certificate failed");
    return w;
  }
  throw RandomizedFailure("order_bound_ps: no collision among sampled powers");
}

/// The identity in the PS model: a^w for a random a and w from order_bound_ps, checked
/// against 16 fresh samples.
template <GroupOracleType O>
Element find_identity_ps(O& oracle, Rng& rng, std::uint64_t q, double delta) {
  const Element a = oracle.random_element(rng);
  const std::uint64_t w = order_bound_ps(a, oracle, rng, q, delta);
  const Element e = pow(oracle, a, w, Element{});
  for (int i = 0; i < 16; ++i) {
    const Element x = oracle.random_element(rng);
    if (oracle.op(e, x) != x) throw RandomizedFailure("find_identity_ps: candidate failed the identity check");
  }
  return e;
}

/// Failure-probability split for one Random Generators run over a group of (estimated)
/// order at most `bound`: at most L = floor(log2 bound) + 1 rounds, each spending
/// `outside_draws` draws and at most outside_draws + L + 2 collision searches.
struct DeltaBudget {
  unsigned rounds = 1;
  unsigned outside_draws = 1;
  double per_search = 0.5;

  static DeltaBudget make(std::uint64_t bound, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ContractError("delta must lie in (0, 1)");
    DeltaBudget b;
    b.rounds = floor_log2(std::max<std::uint64_t>(bound, 1)) + 1;
    b.outside_draws = static_cast<unsigned>(std::ceil(std::log2(2.0 * b.rounds / delta)));
    b.per_search = delta / (2.0 * b.rounds * (b.outside_draws + b.rounds + 3));
    return b;
  }
};

/// One execution of Random Generators, resumable round by round so two runs can be interleaved.
template <GroupOracleType O>
class RandomGeneratorsRun {
 public:
  RandomGeneratorsRun(O& oracle, Rng& rng, double delta) : oracle_(oracle), rng_(rng), delta_(delta) {}

  bool done() const { return done_; }
  std::size_t rounds() const { return chain_.length(); }
  const GeneratorChain& chain() const { return chain_; }
  std::optional<std::uint64_t> size_estimate() const { return q_; }
  /// Order of the subgroup generated so far.
  std::uint64_t partial_order() const { return chain_.order(); }

  void step() {
    if (done_) return;
    if (!started_) {
      start();
      if (done_) return;
    }
    const bool fs = oracle_.model() == Model::FS;
    const std::uint64_t budget = fs ? n_ : *q_;
    const double d = budget_.per_search;

    std::optional<Element> a;
    if (fs) {
      a = detail_find_outside(budget, d);
      if (!a) throw RandomizedFailure("random_generators: no element outside G_i although |G_i| < |G|");
    } else {
      a = detail_find_outside(budget, d);
      if (!a) {
        done_ = true;  // PS guard: nothing found outside, take G_i = G
        return;
      }
    }
    const std::uint64_t bound = fs ? n_ : order_bound_ps(*a, oracle_, rng_, *q_, d);
    const std::uint64_t k = detail::min_exponent(*a, chain_, oracle_, rng_, bound, budget, d);
    const Element b = pow(oracle_, *a, k, chain_.identity);
    auto row = find_exponents(b, chain_, oracle_, rng_, budget, d);
    chain_.push(*a, k, std::move(row));

    if (chain_.length() > budget_.rounds) throw RandomizedFailure("random_generators: chain longer than log2 |G|");
    if (fs) {
      const std::uint64_t ord = chain_.order();
      if (n_ % ord != 0) throw RandomizedFailure("random_generators: |G_i| does not divide |G|");
      if (ord == n_) done_ = true;
    }
  }

  GeneratorChain run() {
    while (!done_) step();
    return chain_;
  }

 private:
  void start() {
    started_ = true;
    if (oracle_.model() == Model::FS) {
      n_ = oracle_.size();
      chain_.identity = oracle_.identity();
      budget_ = DeltaBudget::make(n_, delta_);
      if (n_ == 1) done_ = true;
    } else {
      // delta/4 for the estimate, the rest for the rounds
      const SizeEstimate est = estimate_size(oracle_, rng_, delta_ / 4);
      q_ = est.q;
      budget_ = DeltaBudget::make(*q_, delta_ * 0.75);
      chain_.identity = find_identity_ps(oracle_, rng_, *q_, budget_.per_search);
    }
  }

  std::optional<Element> detail_find_outside(std::uint64_t budget, double d) {
    for (unsigned i = 0; i < budget_.outside_draws; ++i) {
      const Element x = oracle_.random_element(rng_);
      if (!membership_test(x, chain_, oracle_, rng_, budget, d)) return x;
    }
    return std::nullopt;
  }

  O& oracle_;
  Rng& rng_;
  double delta_;
  bool started_ = false;
  bool done_ = false;
  std::uint64_t n_ = 0;
  std::optional<std::uint64_t> q_;
  DeltaBudget budget_;
  GeneratorChain chain_;
};

/// Random Generators in the oracle's model. Throws RandomizedFailure (retryable) when a
/// subroutine misses its certificate.
template <GroupOracleType O>
GeneratorChain random_generators(O& oracle, Rng& rng, double delta) {
  return RandomGeneratorsRun<O>(oracle, rng, delta).run();
}

}  // namespace abelian
