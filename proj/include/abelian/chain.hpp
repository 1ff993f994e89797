#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "abelian/errors.hpp"
#include "abelian/number_theory.hpp"
#include "abelian/oracle.hpp"

namespace abelian {

/// Generators a_1..a_t with triangular relations
///   a_i^{k_i} = a_1^{l_{i,1}} ... a_{i-1}^{l_{i,i-1}},  0 <= l_{i,j} < k_j,
/// where k_i is minimal with a_i^{k_i} in <a_1..a_{i-1}>.
///
/// Indices are 0-based: relations[i] holds the i exponents of row i. A chain built
/// without relations (plain `generators`) leaves `relations` empty.
struct GeneratorChain {
  Element identity;
  std::vector<Element> generators;
  std::vector<std::uint64_t> orders;
  std::vector<std::vector<std::uint64_t>> relations;

  std::size_t length() const { return generators.size(); }
  bool has_relations() const { return relations.size() == generators.size(); }

  /// |<a_1..a_t>| = k_1 ... k_t.
  std::uint64_t order() const { return checked_product(orders); }

  /// The first r generators, which span G_r.
  GeneratorChain prefix(std::size_t r) const {
    GeneratorChain out{identity, {generators.begin(), generators.begin() + r}, {orders.begin(), orders.begin() + r}, {}};
    if (has_relations()) out.relations.assign(relations.begin(), relations.begin() + r);
    return out;
  }

  void push(Element a, std::uint64_t k, std::vector<std::uint64_t> row) {
    if (row.size() != generators.size()) throw ContractError("relation row length must equal the chain length");
    generators.push_back(a);
    orders.push_back(k);
    relations.push_back(std::move(row));
  }
};

/// a_1^{e_1} ... a_r^{e_r} over the first exponents.size() generators. Zero exponents cost nothing.
template <GroupOracleType O>
Element evaluate(O& oracle, const GeneratorChain& chain, std::span<const std::uint64_t> exponents) {
  if (exponents.size() > chain.length()) throw ContractError("more exponents than generators");
  bool have = false;
  Element acc = chain.identity;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] == 0) continue;
    Element f = pow(oracle, chain.generators[i], exponents[i], chain.identity);
    acc = have ? oracle.op(acc, f) : f;
    have = true;
  }
  return acc;
}

/// Checks every relation a_i^{k_i} = eval(row i) against the oracle.
template <GroupOracleType O>
bool relations_hold(O& oracle, const GeneratorChain& chain) {
  if (!chain.has_relations()) return false;
  for (std::size_t i = 0; i < chain.length(); ++i) {
    Element lhs = pow(oracle, chain.generators[i], chain.orders[i], chain.identity);
    if (lhs != evaluate(oracle, chain, chain.relations[i])) return false;
  }
  return true;
}

}  // namespace abelian
