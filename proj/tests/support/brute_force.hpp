#pragma once

// Reference computations for the tests. None of these call the algorithms under test; they
// work on raw tuple coordinates of a GroupSpec or on tiny integer matrices by definition.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "abelian/chain.hpp"
#include "abelian/integer_matrix.hpp"
#include "abelian/oracle.hpp"

namespace brute {

using abelian::BigInt;
using abelian::Element;
using abelian::GroupSpec;

/// Subgroup generated by `gens`, as packed tuple indices, by closure under addition.
inline std::set<std::uint64_t> closure(const GroupSpec& g, const std::vector<Element>& gens) {
  std::set<std::uint64_t> out{0};
  std::vector<std::uint64_t> frontier{0};
  while (!frontier.empty()) {
    std::vector<std::uint64_t> next;
    for (auto x : frontier)
      for (auto a : gens) {
        auto y = g.add_indices(x, g.index_of(a));
        if (out.insert(y).second) next.push_back(y);
      }
    frontier = std::move(next);
  }
  return out;
}

/// k * index by repeated addition.
inline std::uint64_t scale(const GroupSpec& g, std::uint64_t idx, std::uint64_t k) {
  std::uint64_t acc = 0;
  for (std::uint64_t i = 0; i < k; ++i) acc = g.add_indices(acc, idx);
  return acc;
}

inline std::uint64_t order(const GroupSpec& g, Element a) {
  const auto idx = g.index_of(a);
  std::uint64_t acc = idx, k = 1;
  while (acc != 0) {
    acc = g.add_indices(acc, idx);
    ++k;
  }
  return k;
}

/// sum_i e_i * a_i in tuple coordinates; exponents may be negative or unreduced.
inline std::uint64_t evaluate(const GroupSpec& g, const std::vector<Element>& gens, const std::vector<std::int64_t>& e) {
  const auto& f = g.factors();
  std::vector<std::int64_t> coord(f.size(), 0);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto c = g.coordinates(gens[i]);
    for (std::size_t d = 0; d < f.size(); ++d) {
      const auto m = static_cast<std::int64_t>(f[d]);
      const __int128 v = static_cast<__int128>(coord[d]) + static_cast<__int128>(e[i] % m) * static_cast<std::int64_t>(c[d]);
      coord[d] = static_cast<std::int64_t>(((v % m) + m) % m);
    }
  }
  std::uint64_t idx = 0, place = 1;
  for (std::size_t d = 0; d < f.size(); ++d) {
    idx += static_cast<std::uint64_t>(coord[d]) * place;
    place *= f[d];
  }
  return idx;
}

/// Checks everything a generator chain promises, straight from the definitions.
inline bool chain_is_valid(const GroupSpec& g, const abelian::GeneratorChain& chain, bool check_relations) {
  if (chain.identity != g.identity_label()) return false;
  std::vector<Element> prefix;
  for (std::size_t i = 0; i < chain.length(); ++i) {
    const auto sub = closure(g, prefix);
    const auto a = g.index_of(chain.generators[i]);
    if (sub.contains(a)) return false;
    const std::uint64_t k = chain.orders[i];
    for (std::uint64_t j = 1; j < k; ++j)
      if (sub.contains(scale(g, a, j))) return false;
    if (!sub.contains(scale(g, a, k))) return false;
    if (check_relations) {
      if (chain.relations[i].size() != i) return false;
      std::vector<std::int64_t> e(chain.relations[i].begin(), chain.relations[i].end());
      if (evaluate(g, prefix, e) != scale(g, a, k)) return false;
      for (std::size_t j = 0; j < i; ++j)
        if (chain.relations[i][j] >= chain.orders[j]) return false;
    }
    prefix.push_back(chain.generators[i]);
  }
  return closure(g, prefix).size() == g.order();
}

/// Determinant by cofactor expansion; fine for the tiny matrices used in tests.
inline BigInt cofactor_det(const std::vector<std::vector<BigInt>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  BigInt det = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (m[0][c] == 0) continue;
    std::vector<std::vector<BigInt>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<BigInt> row;
      for (std::size_t j = 0; j < n; ++j)
        if (j != c) row.push_back(m[r][j]);
      minor.push_back(std::move(row));
    }
    const BigInt term = m[0][c] * cofactor_det(minor);
    det += (c % 2 == 0) ? term : BigInt(-term);
  }
  return det;
}

inline BigInt gcd_big(BigInt a, BigInt b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    BigInt t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline void subsets(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
                    std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

/// Diagonal of the Smith form from determinantal divisors: d_k = gcd of all k x k minors,
/// s_k = d_k / d_{k-1}. Zero entries mark rank deficiency.
inline std::vector<BigInt> smith_diagonal_by_minors(const abelian::IntegerMatrix& a) {
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<BigInt> out;
  BigInt prev = 1;
  for (std::size_t k = 1; k <= std::min(r, c); ++k) {
    std::vector<std::vector<std::size_t>> rs, cs;
    std::vector<std::size_t> cur;
    subsets(r, k, 0, cur, rs);
    subsets(c, k, 0, cur, cs);
    BigInt d = 0;
    for (const auto& ri : rs)
      for (const auto& ci : cs) {
        std::vector<std::vector<BigInt>> m(k, std::vector<BigInt>(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) m[i][j] = a(ri[i], ci[j]);
        d = gcd_big(d, cofactor_det(m));
      }
    if (d == 0 || prev == 0) {
      out.push_back(0);
      prev = 0;
      continue;
    }
    out.push_back(d / prev);
    prev = d;
  }
  return out;
}

}  // namespace brute
