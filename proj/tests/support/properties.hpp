#pragma once

// Property checks shared by the gtest property binary and the acceptance binary. Each returns
// an empty string on success and a description of the first counterexample otherwise.

#include <cstdint>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "abelian/abelian.hpp"
#include "support/brute_force.hpp"

namespace props {

using namespace abelian;

inline std::string describe(const std::vector<std::uint64_t>& f, std::uint64_t seed) {
  return "group " + format_group_spec(f) + " seed " + std::to_string(seed);
}

/// Random factor list with product <= max_order.
inline std::vector<std::uint64_t> random_factors(Rng& rng, std::uint64_t max_order) {
  std::vector<std::uint64_t> f;
  std::uint64_t n = 1;
  std::uniform_int_distribution<int> len(0, 4);
  const int want = len(rng);
  for (int i = 0; i < want; ++i) {
    const std::uint64_t room = max_order / n;
    if (room < 2) break;
    std::uniform_int_distribution<std::uint64_t> pick(2, std::min<std::uint64_t>(room, 12));
    f.push_back(pick(rng));
    n *= f.back();
  }
  return f;
}

/// Closure, associativity, identity, inverses and commutativity on sampled triples.
inline std::string group_axioms(std::uint64_t seed, int groups = 40, int triples = 200) {
  Rng rng(seed);
  for (int gi = 0; gi < groups; ++gi) {
    const auto f = random_factors(rng, 4096);
    const std::uint64_t ls = rng();
    GroupOracle o(make_group(f, ls), Model::FS);
    const Element e = o.identity();
    for (int t = 0; t < triples; ++t) {
      const Element a = o.random_element(rng), b = o.random_element(rng), c = o.random_element(rng);
      const Element ab = o.op(a, b);
      if (!o.spec().contains(ab)) return describe(f, ls) + ": product out of range";
      if (o.op(ab, c) != o.op(a, o.op(b, c))) return describe(f, ls) + ": associativity";
      if (ab != o.op(b, a)) return describe(f, ls) + ": commutativity";
      if (o.op(a, e) != a || o.op(e, a) != a) return describe(f, ls) + ": identity";
      const Element inv = pow(o, a, brute::order(o.spec(), a) - 1);
      if (o.op(a, inv) != e) return describe(f, ls) + ": inverse";
    }
  }
  return {};
}

/// Psi is a bijective homomorphism Gamma(K, L) -> G, and for unreduced (even negative)
/// exponent vectors v, Psi(reduce(v)) = a_1^{v_1} ... a_t^{v_t}.
inline std::string psi_homomorphism(std::uint64_t seed, int groups = 60) {
  Rng rng(seed);
  for (int gi = 0; gi < groups; ++gi) {
    const auto f = random_factors(rng, 400);
    const std::uint64_t ls = rng();
    GroupOracle o(make_group(f, ls), Model::FS);
    const auto chain = generator_plus(o).first;
    const Presentation p = to_presentation(chain);
    const std::uint64_t n = p.order();

    std::unordered_set<std::uint64_t> images;
    std::vector<std::uint64_t> digits(p.rank(), 0);
    for (std::uint64_t idx = 0; idx < n; ++idx) {
      std::uint64_t rest = idx;
      for (std::size_t i = 0; i < p.rank(); ++i) {
        digits[i] = rest % p.orders[i];
        rest /= p.orders[i];
      }
      images.insert(psi(p, chain, o, Monomial{digits}).label);
    }
    if (images.size() != o.size()) return describe(f, ls) + ": Psi is not a bijection";

    for (int t = 0; t < 100 && p.rank() > 0; ++t) {
      Monomial a{std::vector<std::uint64_t>(p.rank())}, b{std::vector<std::uint64_t>(p.rank())};
      for (std::size_t i = 0; i < p.rank(); ++i) {
        std::uniform_int_distribution<std::uint64_t> pick(0, p.orders[i] - 1);
        a.exponents[i] = pick(rng);
        b.exponents[i] = pick(rng);
      }
      const Element lhs = psi(p, chain, o, multiply(p, a, b));
      const Element rhs = o.op(psi(p, chain, o, a), psi(p, chain, o, b));
      if (lhs != rhs) return describe(f, ls) + ": Psi(ab) != Psi(a)Psi(b)";
      if (psi(p, chain, o, multiply(p, a, inverse(p, a))) != chain.identity)
        return describe(f, ls) + ": a * a^-1 is not the identity";

      std::vector<std::int64_t> raw(p.rank());
      std::uniform_int_distribution<std::int64_t> wide(-1'000'000, 1'000'000);
      for (auto& v : raw) v = wide(rng);
      const Element reduced = psi(p, chain, o, reduce(p, raw));
      if (reduced.label != o.spec().label_of(brute::evaluate(o.spec(), chain.generators, raw)).label)
        return describe(f, ls) + ": unreduced exponents evaluate differently";
    }
  }
  return {};
}

inline IntegerMatrix random_matrix(Rng& rng, std::size_t r, std::size_t c, int bound) {
  IntegerMatrix m(r, c);
  std::uniform_int_distribution<int> pick(-bound, bound);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = pick(rng);
  return m;
}

inline std::vector<std::vector<BigInt>> to_rows(const IntegerMatrix& m) {
  std::vector<std::vector<BigInt>> out(m.rows(), std::vector<BigInt>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

/// U R V = D, |det U| = |det V| = 1, divisibility chain, and D agrees with gcd-of-minors.
inline std::string snf_properties(std::uint64_t seed, int matrices = 300) {
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> dim(1, 4);
  for (int t = 0; t < matrices; ++t) {
    const IntegerMatrix R = random_matrix(rng, dim(rng), dim(rng), t % 3 == 0 ? 3 : 40);
    const SnfResult s = smith_normal_form(R);
    const std::string tag = "matrix " + R.to_string();
    if (s.U * R * s.V != s.D) return tag + ": U R V != D";
    if (!s.D.is_diagonal()) return tag + ": D not diagonal";
    if (brute::cofactor_det(to_rows(s.U)) * brute::cofactor_det(to_rows(s.U)) != 1) return tag + ": U not unimodular";
    if (brute::cofactor_det(to_rows(s.V)) * brute::cofactor_det(to_rows(s.V)) != 1) return tag + ": V not unimodular";
    const auto d = s.diagonal();
    for (std::size_t i = 0; i + 1 < s.rank; ++i)
      if (d[i + 1] % d[i] != 0) return tag + ": divisibility";
    const auto want = brute::smith_diagonal_by_minors(R);
    if (d != want) return tag + ": diagonal differs from determinantal divisors";
  }
  return {};
}

/// A `true` from membership_test is always right; a `false` for a member is rare.
inline std::string membership_soundness(std::uint64_t seed, int groups = 40, int queries = 60) {
  Rng rng(seed);
  std::uint64_t member_queries = 0, member_misses = 0;
  for (int gi = 0; gi < groups; ++gi) {
    auto f = random_factors(rng, 2000);
    if (f.empty()) f = {6};
    const std::uint64_t ls = rng();
    GroupOracle o(make_group(f, ls), Model::FS);
    const auto chain = generator_plus(o).first;
    for (std::size_t r = 0; r < chain.length(); ++r) {
      const SubgroupHandle h = chain.prefix(r);
      const auto sub = brute::closure(o.spec(), h.generators);
      for (int q = 0; q < queries; ++q) {
        const Element x = o.random_element(rng);
        const bool inside = sub.contains(o.spec().index_of(x));
        const bool said = membership_test(x, h, o, rng, o.size(), 0.05);
        if (said && !inside) return describe(f, ls) + ": test accepted a non-member";
        if (inside) {
          ++member_queries;
          member_misses += !said;
        }
      }
    }
  }
  if (member_queries > 0 && member_misses * 10 > member_queries)
    return "members rejected too often: " + std::to_string(member_misses) + "/" + std::to_string(member_queries);
  return {};
}

/// Witnesses from is_isomorphic verify; a witness with two basis images of different order
/// swapped does not.
inline std::string witness_verification(std::uint64_t seed, int pairs = 40) {
  Rng rng(seed);
  const std::vector<std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>> fixed = {
      {{6}, {2, 3}}, {{}, {}}, {{2, 12}, {4, 6}}, {{60}, {3, 4, 5}}, {{2, 2, 4}, {4, 2, 2}}, {{10, 10}, {2, 5, 2, 5}}};
  std::vector<std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>> cases = fixed;
  for (int i = 0; i < pairs; ++i) {
    auto f = random_factors(rng, 256);
    auto g = canonical_invariant_factors(f);
    cases.push_back({f, elementary_divisors(g)});
  }
  for (const auto& [fg, fh] : cases) {
    for (Mode mode : {Mode::Det, Mode::Rand}) {
      GroupOracle og(make_group(fg, rng()), Model::FS), oh(make_group(fh, rng()), Model::FS);
      auto res = is_isomorphic(og, oh, rng, mode, 0.01);
      const std::string tag = format_group_spec(fg) + " vs " + format_group_spec(fh) + " " + std::string(to_string(mode));
      if (!res.isomorphic || !res.witness) return tag + ": not recognized as isomorphic";
      if (!verify_witness(*res.witness, og, oh, 50, rng)) return tag + ": witness rejected";
      const auto& ord = res.witness->invariant_factors;
      for (std::size_t i = 0; i + 1 < ord.size(); ++i) {
        if (ord[i] == ord[i + 1]) continue;
        IsomorphismWitness bad = *res.witness;
        std::swap(bad.h.basis[i], bad.h.basis[i + 1]);
        if (verify_witness(bad, og, oh, 50, rng)) return tag + ": corrupted witness accepted";
        break;
      }
    }
  }
  return {};
}

}  // namespace props
