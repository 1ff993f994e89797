#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "abelian/number_theory.hpp"

namespace abelian {

/// Prime-power decomposition of Z_{f_1} x ... x Z_{f_s}, sorted ascending.
inline std::vector<std::uint64_t> elementary_divisors(const std::vector<std::uint64_t>& factors) {
  std::vector<std::uint64_t> out;
  for (auto f : factors)
    for (auto [p, e] : factorize(f)) out.push_back(ipow(p, e));
  std::sort(out.begin(), out.end());
  return out;
}

/// Invariant factors of Z_{f_1} x ... x Z_{f_s} by the Chinese remainder theorem: for each
/// prime, sort its exponents descending and multiply the i-th largest powers together.
/// Ascending, units dropped.
inline std::vector<std::uint64_t> canonical_invariant_factors(const std::vector<std::uint64_t>& factors) {
  std::map<std::uint64_t, std::vector<unsigned>> by_prime;
  for (auto f : factors)
    for (auto [p, e] : factorize(f)) by_prime[p].push_back(e);
  std::size_t len = 0;
  for (auto& [p, es] : by_prime) {
    std::sort(es.rbegin(), es.rend());
    len = std::max(len, es.size());
  }
  std::vector<std::uint64_t> out(len, 1);
  for (const auto& [p, es] : by_prime)
    for (std::size_t i = 0; i < es.size(); ++i) out[i] *= ipow(p, es[i]);
  std::reverse(out.begin(), out.end());
  return out;
}

/// Every divisibility chain m_1 | ... | m_r (m_i >= 2) with product <= max_order, the empty
/// chain included. One entry per isomorphism class of Abelian groups of order <= max_order.
inline std::vector<std::vector<std::uint64_t>> enumerate_abelian_groups(std::uint64_t max_order) {
  std::vector<std::vector<std::uint64_t>> out;
  std::vector<std::uint64_t> cur;
  std::function<void(std::uint64_t)> extend = [&](std::uint64_t product) {
    out.push_back(cur);
    const std::uint64_t step = cur.empty() ? 1 : cur.back();
    for (std::uint64_t next = cur.empty() ? 2 : step; product * next <= max_order; next += step) {
      cur.push_back(next);
      extend(product * next);
      cur.pop_back();
    }
  };
  extend(1);
  return out;
}

}  // namespace abelian
