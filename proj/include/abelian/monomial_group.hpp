#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "abelian/chain.hpp"
#include "abelian/errors.hpp"
#include "abelian/number_theory.hpp"
#include "abelian/oracle.hpp"

namespace abelian {

using BigInt = boost::multiprecision::cpp_int;

/// Monomial group Gamma(K, L): monomials x_1^{j_1}..x_t^{j_t} with 0 <= j_i < kappa_i under
///   x_1^{kappa_1} = 1,  x_i^{kappa_i} = x_1^{l_{i,1}} ... x_{i-1}^{l_{i,i-1}}.
/// relations[i] (0-based) has exactly i entries, each below the kappa of its column.
struct Presentation {
  std::vector<std::uint64_t> orders;
  std::vector<std::vector<std::uint64_t>> relations;

  std::size_t rank() const { return orders.size(); }
  std::uint64_t order() const { return checked_product(orders); }

  void validate() const {
    if (relations.size() != orders.size()) throw InvalidSpecError("presentation needs one relation row per generator");
    for (std::size_t i = 0; i < orders.size(); ++i) {
      if (orders[i] < 2) throw InvalidSpecError("every kappa must be >= 2");
      if (relations[i].size() != i) throw InvalidSpecError("relation row " + std::to_string(i + 1) + " has wrong length");
      for (std::size_t j = 0; j < i; ++j) {
        if (relations[i][j] >= orders[j])
          throw InvalidSpecError("relation exponent L[" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                 "] must be below kappa_" + std::to_string(j + 1));
      }
    }
    (void)order();
  }

  friend bool operator==(const Presentation&, const Presentation&) = default;
};

struct Monomial {
  std::vector<std::uint64_t> exponents;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

inline Presentation to_presentation(const GeneratorChain& chain) {
  if (!chain.has_relations()) throw ContractError("chain carries no relations");
  Presentation p{chain.orders, chain.relations};
  p.validate();
  return p;
}

/// Largest |intermediate exponent| seen while reducing.
struct ReduceStats {
  __int128 max_abs = 0;
};

namespace detail {

inline __int128 checked_add128(__int128 a, __int128 b) {
  __int128 r;
  if (__builtin_add_overflow(a, b, &r)) throw InternalInconsistencyError("128-bit overflow while reducing a monomial");
  return r;
}

inline __int128 checked_mul128(__int128 a, __int128 b) {
  __int128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw InternalInconsistencyError("128-bit overflow while reducing a monomial");
  return r;
}

inline __int128 abs128(__int128 x) { return x < 0 ? -x : x; }

// x_i^m = x_i^{m mod k} (x_1^{l_{i,1}} ... x_{i-1}^{l_{i,i-1}})^{floor(m/k)}, applied for i = t..1.
// Floor division covers negative m: it is the ceiling identity with the sign folded in.
inline Monomial reduce_wide(const Presentation& p, std::vector<__int128> e, ReduceStats* stats) {
  if (e.size() != p.rank()) throw ContractError("exponent vector length does not match the presentation");
  auto track = [&](__int128 v) {
    if (stats) stats->max_abs = std::max(stats->max_abs, abs128(v));
  };
  for (auto v : e) track(v);
  for (std::size_t i = e.size(); i-- > 0;) {
    const __int128 k = static_cast<__int128>(p.orders[i]);
    __int128 q = e[i] / k;
    __int128 r = e[i] % k;
    if (r < 0) {
      r += k;
      --q;
    }
    e[i] = r;
    if (q == 0) continue;
    for (std::size_t j = 0; j < i; ++j) {
      e[j] = checked_add128(e[j], checked_mul128(q, static_cast<__int128>(p.relations[i][j])));
      track(e[j]);
    }
  }
  Monomial out;
  out.exponents.reserve(e.size());
  for (auto v : e) out.exponents.push_back(static_cast<std::uint64_t>(v));
  return out;
}

}  // namespace detail

inline Monomial identity(const Presentation& p) { return Monomial{std::vector<std::uint64_t>(p.rank(), 0)}; }

inline Monomial reduce(const Presentation& p, const std::vector<std::int64_t>& raw, ReduceStats* stats = nullptr) {
  return detail::reduce_wide(p, std::vector<__int128>(raw.begin(), raw.end()), stats);
}

/// Arbitrary-size exponents. Every x_i satisfies x_i^n = 1 (n = |Gamma|), so entries are
/// first brought into [0, n).
inline Monomial reduce(const Presentation& p, const std::vector<BigInt>& raw) {
  const BigInt n = p.order();
  std::vector<__int128> e;
  e.reserve(raw.size());
  for (const auto& v : raw) {
    BigInt r = v % n;
    if (r < 0) r += n;
    e.push_back(static_cast<__int128>(r.convert_to<std::uint64_t>()));
  }
  return detail::reduce_wide(p, std::move(e), nullptr);
}

inline Monomial multiply(const Presentation& p, const Monomial& a, const Monomial& b, ReduceStats* stats = nullptr) {
  std::vector<__int128> e(p.rank());
  for (std::size_t i = 0; i < e.size(); ++i)
    e[i] = static_cast<__int128>(a.exponents[i]) + static_cast<__int128>(b.exponents[i]);
  return detail::reduce_wide(p, std::move(e), stats);
}

inline Monomial inverse(const Presentation& p, const Monomial& a) {
  std::vector<__int128> e(p.rank());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = -static_cast<__int128>(a.exponents[i]);
  return detail::reduce_wide(p, std::move(e), nullptr);
}

/// a^m, reducing the scaled exponent vector in one pass.
inline Monomial power(const Presentation& p, const Monomial& a, std::uint64_t m) {
  std::vector<__int128> e(p.rank());
  for (std::size_t i = 0; i < e.size(); ++i)
    e[i] = detail::checked_mul128(static_cast<__int128>(a.exponents[i]), static_cast<__int128>(m));
  return detail::reduce_wide(p, std::move(e), nullptr);
}

inline std::uint64_t order_of(const Presentation& p) { return p.order(); }

/// Least d >= 1 with a^d = 1, by descending from |Gamma| over its prime divisors.
inline std::uint64_t element_order(const Presentation& p, const Monomial& a) {
  const Monomial one = identity(p);
  std::uint64_t d = p.order();
  for (auto q : prime_divisors(d)) {
    while (d % q == 0 && power(p, a, d / q) == one) d /= q;
  }
  return d;
}

/// Psi(x_1^{j_1}..x_t^{j_t}) = a_1^{j_1}..a_t^{j_t}.
template <GroupOracleType O>
Element psi(const Presentation& p, const GeneratorChain& chain, O& oracle, const Monomial& m) {
  if (chain.orders != p.orders || chain.relations != p.relations)
    throw ContractError("presentation does not match the generator chain");
  if (m.exponents.size() != p.rank()) throw ContractError("monomial length does not match the presentation");
  return evaluate(oracle, chain, m.exponents);
}

// ---- text formats ---------------------------------------------------------

/// "K=4,3,3; L[2,1]=3 L[3,1]=2 L[3,2]=1" (1-based indices).
inline std::string format_presentation(const Presentation& p) {
  std::ostringstream os;
  os << "K=";
  for (std::size_t i = 0; i < p.orders.size(); ++i) os << (i ? "," : "") << p.orders[i];
  os << ";";
  for (std::size_t i = 1; i < p.relations.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) os << " L[" << i + 1 << "," << j + 1 << "]=" << p.relations[i][j];
  return os.str();
}

/// Inverse of format_presentation; absent L entries default to 0.
inline Presentation parse_presentation(std::string_view text) {
  auto fail = [&](const std::string& why) {
    return InvalidSpecError("malformed presentation '" + std::string(text) + "': " + why);
  };
  std::string s(text);
  auto semi = s.find(';');
  std::string head = s.substr(0, semi);
  std::string tail = semi == std::string::npos ? std::string() : s.substr(semi + 1);

  head.erase(std::remove_if(head.begin(), head.end(), [](unsigned char c) { return std::isspace(c); }), head.end());
  if (head.rfind("K=", 0) != 0) throw fail("expected K=");
  Presentation p;
  std::istringstream ks(head.substr(2));
  std::string tok;
  while (std::getline(ks, tok, ',')) {
    if (tok.empty()) continue;
    try {
      p.orders.push_back(std::stoull(tok));
    } catch (const std::exception&) {
      throw fail("bad kappa '" + tok + "'");
    }
  }
  p.relations.resize(p.orders.size());
  for (std::size_t i = 0; i < p.orders.size(); ++i) p.relations[i].assign(i, 0);

  std::istringstream ls(tail);
  while (ls >> tok) {
    std::size_t i = 0, j = 0;
    std::uint64_t v = 0;
    char c1 = 0, c2 = 0;
    if (std::sscanf(tok.c_str(), "L[%zu,%zu]%c%lu%c", &i, &j, &c1, &v, &c2) != 4 || c1 != '=')
      throw fail("bad relation token '" + tok + "'");
    if (i < 2 || i > p.orders.size() || j < 1 || j >= i) throw fail("relation index out of range in '" + tok + "'");
    p.relations[i - 1][j - 1] = v;
  }
  p.validate();
  return p;
}

/// "x1^2 x2^1 x3^1"; the empty monomial prints as "1".
inline std::string format_monomial(const Monomial& m) {
  if (m.exponents.empty()) return "1";
  std::ostringstream os;
  for (std::size_t i = 0; i < m.exponents.size(); ++i) os << (i ? " " : "") << 'x' << i + 1 << '^' << m.exponents[i];
  return os.str();
}

}  // namespace abelian
