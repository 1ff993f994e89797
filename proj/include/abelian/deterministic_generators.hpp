#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "abelian/chain.hpp"
#include "abelian/errors.hpp"
#include "abelian/oracle.hpp"

namespace abelian {

/// Subset of the labels 0..n-1: membership bitmap plus members in insertion order.
class ElementSet {
 public:
  explicit ElementSet(std::uint64_t n) : in_(n, false) {}

  bool contains(Element a) const { return a.label < in_.size() && in_[a.label]; }

  /// Returns false if already present.
  bool insert(Element a) {
    if (a.label >= in_.size()) throw ContractError("label out of range for element set");
    if (in_[a.label]) return false;
    in_[a.label] = true;
    members_.push_back(a);
    return true;
  }

  std::size_t size() const { return members_.size(); }
  std::uint64_t universe() const { return in_.size(); }
  const std::vector<Element>& members() const { return members_; }

  /// Smallest label not in the set. The cursor only moves forward because sets only grow.
  std::optional<Element> smallest_absent() const {
    while (cursor_ < in_.size() && in_[cursor_]) ++cursor_;
    if (cursor_ == in_.size()) return std::nullopt;
    return Element{cursor_};
  }

 private:
  std::vector<bool> in_;
  std::vector<Element> members_;
  mutable std::uint64_t cursor_ = 0;
};

/// Deterministic choice rule: the smallest label outside `set`.
template <GroupOracleType O>
Element choose_outside_det(const ElementSet& set, const O& oracle) {
  if (set.universe() != oracle.size()) throw ContractError("element set does not cover the oracle's labels");
  auto a = set.smallest_absent();
  if (!a) throw NoElementError("every element of the group is already in the set");
  return *a;
}

template <GroupOracleType O, bool WithTable>
struct ChainBuilder;

/// lambda(a) for every element, stored as a coset forest: a = a_i^j * parent with layer i.
/// Unwinding the parent chain yields the exponent vector in O(t).
class RepresentationTable {
 public:
  RepresentationTable() = default;
  explicit RepresentationTable(std::uint64_t n) : layer_(n, kUnset), exponent_(n, 0), parent_(n, 0) {}

  std::size_t length() const { return length_; }
  std::uint64_t size() const { return layer_.size(); }

  std::vector<std::uint64_t> lambda(Element a) const {
    std::vector<std::uint64_t> out(length_, 0);
    if (a.label >= layer_.size() || layer_[a.label] == kUnset) throw ContractError("element has no representation");
    std::uint64_t cur = a.label;
    while (layer_[cur] != 0) {
      out[layer_[cur] - 1] = exponent_[cur];
      cur = parent_[cur];
    }
    return out;
  }

 private:
  template <GroupOracleType O, bool>
  friend struct ChainBuilder;

  static constexpr std::uint8_t kUnset = 0xff;

  std::vector<std::uint8_t> layer_;  // 0 for the identity, i for coset layer of generator i (1-based)
  std::vector<std::uint32_t> exponent_;
  std::vector<std::uint32_t> parent_;
  std::size_t length_ = 0;
};

template <GroupOracleType O, bool WithTable>
struct ChainBuilder {
  static std::pair<GeneratorChain, RepresentationTable> run(O& oracle) {
    const std::uint64_t n = oracle.size();
    GeneratorChain chain;
    chain.identity = oracle.identity();
    ElementSet current(n);
    current.insert(chain.identity);
    RepresentationTable table;
    if constexpr (WithTable) {
      table = RepresentationTable(n);
      table.layer_[chain.identity.label] = 0;
    }

    while (current.size() < n) {
      const Element a = choose_outside_det(current, oracle);
      const std::size_t layer = chain.length() + 1;
      if (layer >= RepresentationTable::kUnset) throw InternalInconsistencyError("generator chain too long");

      // a, a^2, ... until the first power that lands in G_{i-1}.
      std::vector<Element> powers{a};
      Element x = oracle.op(a, a);
      while (!current.contains(x)) {
        powers.push_back(x);
        x = oracle.op(x, a);
      }
      const std::uint64_t k = powers.size() + 1;

      std::vector<std::uint64_t> row;
      if constexpr (WithTable) {
        table.length_ = chain.length();
        row = table.lambda(x);
      }

      // G_i = G_{i-1} u a G_{i-1} u ... u a^{k-1} G_{i-1}; every element lands exactly once.
      const std::size_t base = current.size();
      for (std::uint64_t j = 1; j < k; ++j) {
        const Element pj = powers[j - 1];
        for (std::size_t idx = 0; idx < base; ++idx) {
          const Element b = current.members()[idx];
          const Element c = (b == chain.identity) ? pj : oracle.op(pj, b);
          if (!current.insert(c)) throw InternalInconsistencyError("coset layers overlap; oracle is not an Abelian group");
          if constexpr (WithTable) {
            table.layer_[c.label] = static_cast<std::uint8_t>(layer);
            table.exponent_[c.label] = static_cast<std::uint32_t>(j);
            table.parent_[c.label] = static_cast<std::uint32_t>(b.label);
          }
        }
      }
      if (current.size() != base * k) throw InternalInconsistencyError("|G_i| != k_i |G_{i-1}|");

      chain.generators.push_back(a);
      chain.orders.push_back(k);
      if constexpr (WithTable) chain.relations.push_back(std::move(row));
    }
    if constexpr (WithTable) table.length_ = chain.length();
    return {std::move(chain), std::move(table)};
  }
};

/// Generators with minimal k_i by explicit coset enumeration. FS model only.
template <GroupOracleType O>
GeneratorChain generators(O& oracle) {
  return ChainBuilder<O, false>::run(oracle).first;
}

/// As `generators`, plus the relation rows and the full representation table.
/// Uses fewer than 2|G| product accesses.
template <GroupOracleType O>
std::pair<GeneratorChain, RepresentationTable> generator_plus(O& oracle) {
  return ChainBuilder<O, true>::run(oracle);
}

}  // namespace abelian
