#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "abelian/errors.hpp"
#include "abelian/number_theory.hpp"

namespace abelian {

using Rng = std::mt19937_64;

/// Opaque group element. Labels carry no structure; equality is label equality.
struct Element {
  std::uint64_t label = 0;

  friend bool operator==(Element, Element) = default;
  friend auto operator<=>(Element, Element) = default;
};

/// FS: the size is known and every label may be queried.
/// PS: the size is unknown; only labels already observed may be multiplied.
enum class Model { FS, PS };

inline std::string_view to_string(Model m) { return m == Model::FS ? "fs" : "ps"; }

inline Model parse_model(std::string_view s) {
  if (s == "fs") return Model::FS;
  if (s == "ps") return Model::PS;
  throw InvalidSpecError("unknown oracle model '" + std::string(s) + "' (expected fs or ps)");
}

struct Counters {
  std::uint64_t products = 0;
  std::uint64_t elements = 0;

  std::uint64_t total() const { return products + elements; }
  friend bool operator==(const Counters&, const Counters&) = default;
};

// Labels are stored in 32-bit arrays; the hidden group must stay below this order.
inline constexpr std::uint64_t kMaxGroupOrder = std::uint64_t{1} << 32;

/// Hidden group Z_{m1} x ... x Z_{ms} behind a bijective relabeling onto 0..n-1.
///
/// Tuple coordinates are packed little-endian mixed radix: the first factor is the
/// least significant digit. Products are computed from the tuples on demand, so no
/// Cayley table is ever materialized.
class GroupSpec {
 public:
  /// Uniform random relabeling (seeded Fisher-Yates). An empty factor list is the trivial group.
  static GroupSpec make(std::vector<std::uint64_t> factors, std::uint64_t label_seed) {
    GroupSpec g(std::move(factors));
    g.seed_ = label_seed;
    std::vector<std::uint32_t> perm(g.n_);
    std::iota(perm.begin(), perm.end(), 0u);
    Rng rng(label_seed);
    for (std::uint64_t i = g.n_; i > 1; --i) {
      std::uniform_int_distribution<std::uint64_t> pick(0, i - 1);
      std::swap(perm[i - 1], perm[pick(rng)]);
    }
    g.install(std::move(perm));
    return g;
  }

  /// Explicit labeling: label_to_index[label] is the packed tuple index of that label.
  static GroupSpec with_labeling(std::vector<std::uint64_t> factors,
                                 std::vector<std::uint32_t> label_to_index) {
    GroupSpec g(std::move(factors));
    if (label_to_index.size() != g.n_) throw InvalidSpecError("labeling size does not match group order");
    std::vector<bool> hit(g.n_, false);
    for (auto idx : label_to_index) {
      if (idx >= g.n_ || hit[idx]) throw InvalidSpecError("labeling is not a bijection");
      hit[idx] = true;
    }
    g.install(std::move(label_to_index));
    return g;
  }

  const std::vector<std::uint64_t>& factors() const { return factors_; }
  std::uint64_t order() const { return n_; }
  std::uint64_t label_seed() const { return seed_; }

  std::uint64_t index_of(Element a) const {
    check_label(a);
    return to_index_[a.label];
  }
  Element label_of(std::uint64_t index) const { return Element{to_label_[index]}; }

  std::vector<std::uint64_t> coordinates(Element a) const {
    std::uint64_t idx = index_of(a);
    std::vector<std::uint64_t> c(factors_.size());
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      c[i] = idx % factors_[i];
      idx /= factors_[i];
    }
    return c;
  }

  /// Group law on packed tuple indices.
  std::uint64_t add_indices(std::uint64_t x, std::uint64_t y) const {
    std::uint64_t out = 0, place = 1;
    for (auto m : factors_) {
      std::uint64_t s = x % m + y % m;
      if (s >= m) s -= m;
      out += s * place;
      place *= m;
      x /= m;
      y /= m;
    }
    return out;
  }

  /// Uncounted product; oracles wrap this with access accounting.
  Element product(Element a, Element b) const {
    return label_of(add_indices(index_of(a), index_of(b)));
  }

  Element identity_label() const { return label_of(0); }

  bool contains(Element a) const { return a.label < n_; }

  void check_label(Element a) const {
    if (a.label >= n_) throw ContractError("label " + std::to_string(a.label) + " out of range");
  }

 private:
  explicit GroupSpec(std::vector<std::uint64_t> factors) : factors_(std::move(factors)) {
    for (auto m : factors_) {
      if (m < 2) throw InvalidSpecError("every factor must be >= 2, got " + std::to_string(m));
    }
    n_ = checked_product(factors_);
    if (n_ >= kMaxGroupOrder) throw InvalidSpecError("group order exceeds 2^32");
  }

  void install(std::vector<std::uint32_t> label_to_index) {
    to_index_ = std::move(label_to_index);
    to_label_.assign(n_, 0);
    for (std::uint64_t l = 0; l < n_; ++l) to_label_[to_index_[l]] = static_cast<std::uint32_t>(l);
  }

  std::vector<std::uint64_t> factors_;
  std::uint64_t n_ = 1;
  std::uint64_t seed_ = 0;
  std::vector<std::uint32_t> to_index_;
  std::vector<std::uint32_t> to_label_;
};

inline GroupSpec make_group(std::vector<std::uint64_t> factors, std::uint64_t label_seed) {
  return GroupSpec::make(std::move(factors), label_seed);
}

/// Parses "4x3x3". "1" and "" denote the trivial group.
inline std::vector<std::uint64_t> parse_group_spec(std::string_view s) {
  std::vector<std::uint64_t> out;
  if (s.empty() || s == "1") return out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto next = s.find('x', pos);
    auto tok = s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw InvalidSpecError("malformed group spec '" + std::string(s) + "'");
    std::uint64_t v = std::stoull(std::string(tok));
    if (v < 2) throw InvalidSpecError("every factor must be >= 2 in '" + std::string(s) + "'");
    out.push_back(v);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

inline std::string format_group_spec(const std::vector<std::uint64_t>& factors) {
  if (factors.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(factors[i]);
  }
  return s;
}

/// Counted oracle over a GroupSpec. One product access per op(), one element access per
/// random_element() or identity().
class GroupOracle {
 public:
  GroupOracle(std::shared_ptr<const GroupSpec> spec, Model model)
      : spec_(std::move(spec)), model_(model) {
    if (model_ == Model::PS) seen_.assign(spec_->order(), false);
  }
  GroupOracle(GroupSpec spec, Model model)
      : GroupOracle(std::make_shared<const GroupSpec>(std::move(spec)), model) {}

  Element op(Element a, Element b) {
    require_visible(a);
    require_visible(b);
    ++counters_.products;
    Element c = spec_->product(a, b);
    mark(c);
    return c;
  }

  Element random_element(Rng& rng) {
    ++counters_.elements;
    std::uniform_int_distribution<std::uint64_t> pick(0, spec_->order() - 1);
    Element a{pick(rng)};
    mark(a);
    return a;
  }

  Element identity() {
    if (model_ == Model::PS) throw ModelViolationError("identity is not given in the PS model");
    ++counters_.elements;
    return spec_->identity_label();
  }

  std::uint64_t size() const {
    if (model_ == Model::PS) throw ModelViolationError("group size is unknown in the PS model");
    return spec_->order();
  }

  Model model() const { return model_; }
  const Counters& counters() const { return counters_; }
  const GroupSpec& spec() const { return *spec_; }
  std::shared_ptr<const GroupSpec> shared_spec() const { return spec_; }

  bool seen(Element a) const { return model_ == Model::FS || (a.label < seen_.size() && seen_[a.label]); }

 private:
  void require_visible(Element a) const {
    spec_->check_label(a);
    if (model_ == Model::PS && !seen_[a.label])
      throw ModelViolationError("PS model: label " + std::to_string(a.label) + " has not been observed");
  }
  void mark(Element a) {
    if (model_ == Model::PS) seen_[a.label] = true;
  }

  std::shared_ptr<const GroupSpec> spec_;
  Model model_;
  Counters counters_;
  std::vector<bool> seen_;
};

/// What the algorithms need from an oracle. GroupOracle and the adversary oracle both model it.
template <class O>
concept GroupOracleType = requires(O& o, const O& co, Element a, Rng& rng) {
  { o.op(a, a) } -> std::same_as<Element>;
  { o.random_element(rng) } -> std::same_as<Element>;
  { o.identity() } -> std::same_as<Element>;
  { co.size() } -> std::convertible_to<std::uint64_t>;
  { co.model() } -> std::same_as<Model>;
  { co.counters() } -> std::convertible_to<Counters>;
};

/// a^m by square-and-multiply; `e` is returned for m = 0. Uses at most 2*log2(m) products.
template <GroupOracleType O>
Element pow(O& oracle, Element a, std::uint64_t m, Element e) {
  if (m == 0) return e;
  Element base = a;
  bool have = false;
  Element acc{};
  while (true) {
    if (m & 1u) {
      acc = have ? oracle.op(acc, base) : base;
      have = true;
    }
    m >>= 1;
    if (m == 0) break;
    base = oracle.op(base, base);
  }
  return acc;
}

/// a^m; queries the identity only when m = 0 (FS model).
template <GroupOracleType O>
Element pow(O& oracle, Element a, std::uint64_t m) {
  if (m == 0) return oracle.identity();
  return pow(oracle, a, m, Element{});
}

}  // namespace abelian

template <>
struct std::hash<abelian::Element> {
  std::size_t operator()(abelian::Element e) const noexcept { return std::hash<std::uint64_t>{}(e.label); }
};
