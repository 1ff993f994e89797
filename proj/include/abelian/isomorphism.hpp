#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "abelian/chain.hpp"
#include "abelian/deterministic_generators.hpp"
#include "abelian/errors.hpp"
#include "abelian/monomial_group.hpp"
#include "abelian/oracle.hpp"
#include "abelian/randomized_generators.hpp"
#include "abelian/snf_basis.hpp"

namespace abelian {

enum class Mode { Det, Rand };

inline std::string_view to_string(Mode m) { return m == Mode::Det ? "det" : "rand"; }

inline Mode parse_mode(std::string_view s) {
  if (s == "det") return Mode::Det;
  if (s == "rand") return Mode::Rand;
  throw InvalidSpecError("unknown mode '" + std::string(s) + "' (expected det or rand)");
}

/// b_1..b_r with orders m_1 | ... | m_r, plus everything used to get there.
struct BasisResult {
  std::vector<Element> basis;
  std::vector<std::uint64_t> orders;
  GeneratorChain chain;
  Presentation presentation;
  std::optional<SnfResult> snf;  // absent for the trivial group
  std::vector<Monomial> monomials;
  std::optional<std::uint64_t> size_estimate;

  std::uint64_t group_order() const { return chain.order(); }
};

/// Gamma(K, L) -> SNF -> monomial basis -> Psi images.
template <GroupOracleType O>
BasisResult basis_from_chain(GeneratorChain chain, O& oracle) {
  BasisResult out;
  out.presentation = to_presentation(chain);
  out.chain = std::move(chain);
  if (out.presentation.rank() == 0) return out;
  out.snf = smith_normal_form(build_relation_matrix(out.presentation));
  out.orders = invariant_factors(*out.snf);
  out.monomials = basis_from_snf(out.presentation, *out.snf);
  for (const auto& y : out.monomials) out.basis.push_back(psi(out.presentation, out.chain, oracle, y));
  return out;
}

template <GroupOracleType O>
BasisResult find_basis(O& oracle, Rng& rng, Mode mode, double delta) {
  if (mode == Mode::Det) {
    if (oracle.model() != Model::FS) throw ModelViolationError("deterministic mode needs the FS model");
    return basis_from_chain(generator_plus(oracle).first, oracle);
  }
  RandomGeneratorsRun<O> run(oracle, rng, delta);
  run.run();
  BasisResult out = basis_from_chain(run.chain(), oracle);
  out.size_estimate = run.size_estimate();
  return out;
}

/// Coordinates of x over the basis: e with x = prod b_i^{e_i}, 0 <= e_i < m_i.
template <GroupOracleType O>
std::vector<std::uint64_t> decompose(const BasisResult& b, Element x, O& oracle, Rng& rng, double delta) {
  if (!b.snf) {
    if (x != b.chain.identity) throw ContractError("non-identity element in the trivial group");
    return {};
  }
  const auto lambda = find_exponents(x, b.chain, oracle, rng, b.chain.order(), delta);
  return basis_coordinates(b.presentation, *b.snf, Monomial{lambda});
}

/// prod b_i^{e_i} evaluated in the oracle.
template <GroupOracleType O>
Element compose(const BasisResult& b, const std::vector<std::uint64_t>& coords, O& oracle) {
  if (coords.size() != b.basis.size()) throw ContractError("coordinate vector length does not match the basis");
  Element acc = b.chain.identity;
  bool have = false;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (coords[i] == 0) continue;
    const Element f = pow(oracle, b.basis[i], coords[i], b.chain.identity);
    acc = have ? oracle.op(acc, f) : f;
    have = true;
  }
  return acc;
}

/// b_i^G -> b_i^H extended multiplicatively. Elements are mapped on demand.
struct IsomorphismWitness {
  std::vector<std::uint64_t> invariant_factors;
  BasisResult g;
  BasisResult h;
  double delta = 1e-9;

  template <GroupOracleType OG, GroupOracleType OH>
  Element map(Element x, OG& oracle_g, OH& oracle_h, Rng& rng) const {
    return compose(h, decompose(g, x, oracle_g, rng, delta), oracle_h);
  }
};

struct IsomorphismResult {
  bool isomorphic = false;
  std::vector<std::uint64_t> invariant_factors_g;
  std::vector<std::uint64_t> invariant_factors_h;
  std::optional<IsomorphismWitness> witness;
  bool halted_early = false;  // decided from sizes alone, before both pipelines finished
};

namespace detail {

template <GroupOracleType O>
std::uint64_t accesses(const O& o) {
  return static_cast<Counters>(o.counters()).total();
}

}  // namespace detail

/// Decides G ~ H by comparing invariant factors. In rand mode the two Random Generators runs
/// advance one round at a time, always stepping the side that has used fewer accesses, and
/// stop as soon as one side finishes with an order the other side has already outgrown or
/// cannot divide.
template <GroupOracleType OG, GroupOracleType OH>
IsomorphismResult is_isomorphic(OG& oracle_g, OH& oracle_h, Rng& rng, Mode mode, double delta) {
  IsomorphismResult res;
  if (oracle_g.model() == Model::FS && oracle_h.model() == Model::FS && oracle_g.size() != oracle_h.size()) {
    res.halted_early = true;
    return res;
  }

  std::optional<BasisResult> bg, bh;
  if (mode == Mode::Det) {
    bg = find_basis(oracle_g, rng, mode, delta);
    bh = find_basis(oracle_h, rng, mode, delta);
  } else {
    Rng rng_g(rng()), rng_h(rng());
    RandomGeneratorsRun<OG> rg(oracle_g, rng_g, delta / 2);
    RandomGeneratorsRun<OH> rh(oracle_h, rng_h, delta / 2);
    auto outgrown = [](std::uint64_t finished, std::uint64_t partial) {
      return partial > finished || finished % partial != 0;
    };
    while (!rg.done() || !rh.done()) {
      const bool step_g = !rg.done() && (rh.done() || detail::accesses(oracle_g) <= detail::accesses(oracle_h));
      if (step_g)
        rg.step();
      else
        rh.step();
      const bool size_mismatch = (rg.done() && rh.done() && rg.partial_order() != rh.partial_order()) ||
                                 (rg.done() && !rh.done() && outgrown(rg.partial_order(), rh.partial_order())) ||
                                 (rh.done() && !rg.done() && outgrown(rh.partial_order(), rg.partial_order()));
      if (size_mismatch) {
        res.halted_early = !(rg.done() && rh.done());
        return res;
      }
    }
    bg = basis_from_chain(rg.chain(), oracle_g);
    bh = basis_from_chain(rh.chain(), oracle_h);
  }

  res.invariant_factors_g = bg->orders;
  res.invariant_factors_h = bh->orders;
  res.isomorphic = bg->orders == bh->orders;
  if (res.isomorphic) {
    IsomorphismWitness w;
    w.invariant_factors = bg->orders;
    w.g = std::move(*bg);
    w.h = std::move(*bh);
    res.witness = std::move(w);
  }
  return res;
}

/// Checks the witness against both oracles: basis orders on each side, the homomorphism law on
/// `samples` random pairs, and for |G| <= 256 bijectivity over every coordinate tuple.
template <GroupOracleType OG, GroupOracleType OH>
bool verify_witness(const IsomorphismWitness& w, OG& oracle_g, OH& oracle_h, std::uint64_t samples, Rng& rng) {
  try {
    const auto& f = w.invariant_factors;
    if (w.g.orders != f || w.h.orders != f || w.g.basis.size() != f.size() || w.h.basis.size() != f.size())
      return false;
    auto has_order = [](auto& oracle, Element b, std::uint64_t m, Element e) {
      if (pow(oracle, b, m, e) != e) return false;
      for (auto p : prime_divisors(m))
        if (pow(oracle, b, m / p, e) == e) return false;
      return true;
    };
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!has_order(oracle_g, w.g.basis[i], f[i], w.g.chain.identity)) return false;
      if (!has_order(oracle_h, w.h.basis[i], f[i], w.h.chain.identity)) return false;
    }

    for (std::uint64_t s = 0; s < samples; ++s) {
      const Element x = oracle_g.random_element(rng);
      const Element y = oracle_g.random_element(rng);
      const Element lhs = w.map(oracle_g.op(x, y), oracle_g, oracle_h, rng);
      const Element rhs = oracle_h.op(w.map(x, oracle_g, oracle_h, rng), w.map(y, oracle_g, oracle_h, rng));
      if (lhs != rhs) return false;
    }

    const std::uint64_t n = checked_product(f);
    if (n <= 256) {
      std::unordered_set<std::uint64_t> img_g, img_h;
      std::vector<std::uint64_t> coords(f.size(), 0);
      for (std::uint64_t idx = 0; idx < n; ++idx) {
        std::uint64_t rest = idx;
        for (std::size_t i = 0; i < f.size(); ++i) {
          coords[i] = rest % f[i];
          rest /= f[i];
        }
        const Element x = compose(w.g, coords, oracle_g);
        const Element y = compose(w.h, coords, oracle_h);
        if (w.map(x, oracle_g, oracle_h, rng) != y) return false;
        img_g.insert(x.label);
        img_h.insert(y.label);
      }
      if (img_g.size() != n || img_h.size() != n) return false;
      if (oracle_g.model() == Model::FS && oracle_g.size() != n) return false;
      if (oracle_h.model() == Model::FS && oracle_h.size() != n) return false;
    }
    return true;
  } catch (const AbelianError&) {
    return false;
  }
}

}  // namespace abelian
