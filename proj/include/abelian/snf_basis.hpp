#pragma once

#include <algorithm>
#include <cstdint>
#include <tuple>
#include <vector>

#include "abelian/errors.hpp"
#include "abelian/integer_matrix.hpp"
#include "abelian/monomial_group.hpp"

namespace abelian {

/// U * R * V = D with U, V unimodular and D = diag(m_1, ..., m_r, 0, ..., 0), m_1 | ... | m_r.
/// V_inverse is carried along so the basis can be read off without a matrix inversion.
struct SnfResult {
  IntegerMatrix U;
  IntegerMatrix V;
  IntegerMatrix V_inverse;
  IntegerMatrix D;
  std::size_t rank = 0;

  std::vector<BigInt> diagonal() const {
    std::vector<BigInt> d;
    for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i) d.push_back(D(i, i));
    return d;
  }
};

/// Relation matrix of Gamma(K, L). Row r encodes the relation of generator x_{t-r} and
/// column c stands for x_{t-c}:
///   [ -k_t  l_{t,t-1} ... l_{t,1} ]
///   [  0    -k_{t-1}  ... l_{t-1,1} ]
///   [  ...                        ]
///   [  0    0         ... -k_1     ]
inline IntegerMatrix build_relation_matrix(const Presentation& p) {
  p.validate();
  const std::size_t t = p.rank();
  if (t == 0) throw ContractError("relation matrix of the trivial presentation is empty");
  IntegerMatrix R(t, t);
  for (std::size_t r = 0; r < t; ++r) {
    const std::size_t gen = t - 1 - r;  // 0-based generator index of this row
    R(r, r) = -BigInt(p.orders[gen]);
    for (std::size_t c = r + 1; c < t; ++c) R(r, c) = BigInt(p.relations[gen][t - 1 - c]);
  }
  return R;
}

namespace detail {

/// (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0.
inline std::tuple<BigInt, BigInt, BigInt> extended_gcd(const BigInt& a, const BigInt& b) {
  BigInt old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    BigInt q = old_r / r;
    BigInt tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
    tmp = old_t - q * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

class SnfEngine {
 public:
  explicit SnfEngine(const IntegerMatrix& R)
      : A(R), U(IntegerMatrix::identity(R.rows())), V(IntegerMatrix::identity(R.cols())),
        Vinv(IntegerMatrix::identity(R.cols())) {}

  IntegerMatrix A, U, V, Vinv;

  // row_i <- a row_i + b row_j ; row_j <- c row_i + d row_j   (determinant +-1)
  void row_op(std::size_t i, std::size_t j, const BigInt& a, const BigInt& b, const BigInt& c, const BigInt& d) {
    combine_rows(A, i, j, a, b, c, d);
    combine_rows(U, i, j, a, b, c, d);
  }

  // col_i <- a col_i + b col_j ; col_j <- c col_i + d col_j, i.e. A <- A E. Vinv <- E^{-1} Vinv.
  void col_op(std::size_t i, std::size_t j, const BigInt& a, const BigInt& b, const BigInt& c, const BigInt& d) {
    combine_cols(A, i, j, a, b, c, d);
    combine_cols(V, i, j, a, b, c, d);
    const BigInt det = a * d - b * c;
    if (det != 1 && det != -1) throw InternalInconsistencyError("non-unimodular column operation");
    combine_rows(Vinv, i, j, d * det, -c * det, -b * det, a * det);
  }

  void swap_rows(std::size_t i, std::size_t j) {
    if (i != j) row_op(i, j, 0, 1, 1, 0);
  }
  void swap_cols(std::size_t i, std::size_t j) {
    if (i != j) col_op(i, j, 0, 1, 1, 0);
  }
  void negate_row(std::size_t i) {
    for (std::size_t c = 0; c < A.cols(); ++c) A(i, c) = -A(i, c);
    for (std::size_t c = 0; c < U.cols(); ++c) U(i, c) = -U(i, c);
  }

  // Clears A(i, col) against pivot row k (pivot A(k, col)).
  void eliminate_row(std::size_t k, std::size_t i, std::size_t col) {
    const BigInt a = A(k, col), b = A(i, col);
    if (b == 0) return;
    if (b % a == 0) {
      row_op(k, i, 1, 0, -(b / a), 1);
      return;
    }
    auto [g, s, t] = extended_gcd(a, b);
    row_op(k, i, s, t, -(b / g), a / g);
  }

  // Clears A(row, j) against pivot column k (pivot A(row, k)).
  void eliminate_col(std::size_t k, std::size_t j, std::size_t row) {
    const BigInt a = A(row, k), b = A(row, j);
    if (b == 0) return;
    if (b % a == 0) {
      col_op(k, j, 1, 0, -(b / a), 1);
      return;
    }
    auto [g, s, t] = extended_gcd(a, b);
    col_op(k, j, s, t, -(b / g), a / g);
  }

 private:
  static void combine_rows(IntegerMatrix& M, std::size_t i, std::size_t j, const BigInt& a, const BigInt& b,
                           const BigInt& c, const BigInt& d) {
    for (std::size_t col = 0; col < M.cols(); ++col) {
      BigInt x = M(i, col), y = M(j, col);
      M(i, col) = a * x + b * y;
      M(j, col) = c * x + d * y;
    }
  }
  static void combine_cols(IntegerMatrix& M, std::size_t i, std::size_t j, const BigInt& a, const BigInt& b,
                           const BigInt& c, const BigInt& d) {
    for (std::size_t row = 0; row < M.rows(); ++row) {
      BigInt x = M(row, i), y = M(row, j);
      M(row, i) = a * x + b * y;
      M(row, j) = c * x + d * y;
    }
  }
};

inline BigInt abs_big(const BigInt& x) { return x < 0 ? BigInt(-x) : x; }

}  // namespace detail

/// Exact Smith normal form. Row Hermite form first (entries above each pivot reduced
/// modulo the pivot), then pivot-by-pivot diagonalization with extended-gcd row and column
/// operations, then the divisibility fix-up on the diagonal. U R V = D, unimodularity and the
/// divisibility chain are checked before returning.
inline SnfResult smith_normal_form(const IntegerMatrix& R) {
  if (R.rows() == 0 || R.cols() == 0) throw ContractError("smith_normal_form needs a non-empty matrix");
  detail::SnfEngine s(R);
  const std::size_t m = R.rows(), n = R.cols();

  // Hermite phase.
  std::size_t prow = 0;
  for (std::size_t c = 0; c < n && prow < m; ++c) {
    std::size_t nz = prow;
    while (nz < m && s.A(nz, c) == 0) ++nz;
    if (nz == m) continue;
    s.swap_rows(prow, nz);
    for (std::size_t i = prow + 1; i < m; ++i) s.eliminate_row(prow, i, c);
    if (s.A(prow, c) < 0) s.negate_row(prow);
    const BigInt piv = s.A(prow, c);
    for (std::size_t i = 0; i < prow; ++i) {
      BigInt q = s.A(i, c) / piv;
      if (s.A(i, c) - q * piv < 0) --q;
      if (q != 0) s.row_op(i, prow, 1, -q, 0, 1);
    }
    ++prow;
  }

  // Diagonalization.
  std::size_t rank = 0;
  for (std::size_t k = 0; k < std::min(m, n); ++k) {
    bool clean = false;
    while (!clean) {
      std::size_t bi = m, bj = n;
      BigInt best;
      for (std::size_t i = k; i < m; ++i)
        for (std::size_t j = k; j < n; ++j) {
          if (s.A(i, j) == 0) continue;
          BigInt v = detail::abs_big(s.A(i, j));
          if (bi == m || v < best) {
            best = v;
            bi = i;
            bj = j;
          }
        }
      if (bi == m) break;
      s.swap_rows(k, bi);
      s.swap_cols(k, bj);
      for (std::size_t i = k + 1; i < m; ++i) s.eliminate_row(k, i, k);
      for (std::size_t j = k + 1; j < n; ++j) s.eliminate_col(k, j, k);
      clean = true;
      for (std::size_t i = k + 1; i < m; ++i)
        if (s.A(i, k) != 0) clean = false;
    }
    if (s.A(k, k) == 0) break;
    if (s.A(k, k) < 0) s.negate_row(k);
    ++rank;
  }

  // Divisibility chain.
  for (std::size_t i = 0; i < rank; ++i) {
    for (std::size_t j = i + 1; j < rank; ++j) {
      const BigInt a = s.A(i, i), b = s.A(j, j);
      if (b % a == 0) continue;
      auto [g, x, y] = detail::extended_gcd(a, b);
      s.row_op(i, j, x, y, -(b / g), a / g);
      s.col_op(i, j, 1, 1, -(y * b / g), x * a / g);
    }
  }
  for (std::size_t i = 0; i < rank; ++i)
    if (s.A(i, i) < 0) s.negate_row(i);

  SnfResult out{std::move(s.U), std::move(s.V), std::move(s.Vinv), std::move(s.A), rank};

  if (!out.D.is_diagonal()) throw InternalInconsistencyError("SNF result is not diagonal");
  if (out.U * R * out.V != out.D) throw InternalInconsistencyError("SNF check U*R*V = D failed");
  if (out.V * out.V_inverse != IntegerMatrix::identity(n)) throw InternalInconsistencyError("V_inverse is wrong");
  if (detail::abs_big(out.U.determinant()) != 1 || detail::abs_big(out.V.determinant()) != 1)
    throw InternalInconsistencyError("SNF transform is not unimodular");
  for (std::size_t i = 0; i + 1 < rank; ++i)
    if (out.D(i + 1, i + 1) % out.D(i, i) != 0) throw InternalInconsistencyError("SNF divisibility chain broken");
  return out;
}

/// Nonzero diagonal entries of the SNF greater than one, ascending along the divisibility chain.
inline std::vector<std::uint64_t> invariant_factors(const SnfResult& snf) {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < snf.rank; ++i)
    if (snf.D(i, i) > 1) out.push_back(snf.D(i, i).convert_to<std::uint64_t>());
  return out;
}

inline std::vector<std::uint64_t> invariant_factors(const Presentation& p) {
  if (p.rank() == 0) return {};
  return invariant_factors(smith_normal_form(build_relation_matrix(p)));
}

/// Basis y_1..y_r of Gamma(K, L), one per invariant factor m_i > 1.
///
/// Relations are the rows of R, so v -> v V maps Z^t / rowspace(R) onto
/// Z^t / rowspace(D); the i-th unit vector pulls back to row i of V^{-1}. Column c of that row
/// is the exponent of x_{t-c}.
inline std::vector<Monomial> basis_from_snf(const Presentation& p, const SnfResult& snf) {
  const std::size_t t = p.rank();
  if (snf.V_inverse.rows() != t) throw ContractError("SNF does not belong to this presentation");
  std::vector<Monomial> basis;
  for (std::size_t i = 0; i < snf.rank; ++i) {
    if (snf.D(i, i) <= 1) continue;
    std::vector<BigInt> raw(t);
    for (std::size_t g = 0; g < t; ++g) raw[g] = snf.V_inverse(i, t - 1 - g);
    Monomial y = reduce(p, raw);
    const auto want = snf.D(i, i).convert_to<std::uint64_t>();
    if (element_order(p, y) != want)
      throw InternalInconsistencyError("basis element order " + std::to_string(element_order(p, y)) +
                                       " does not match invariant factor " + std::to_string(want));
    basis.push_back(std::move(y));
  }
  return basis;
}

/// Coordinates of a monomial over basis_from_snf: e_i = (v V)_i mod m_i, where v lists the
/// exponents in relation-matrix column order.
inline std::vector<std::uint64_t> basis_coordinates(const Presentation& p, const SnfResult& snf, const Monomial& x) {
  const std::size_t t = p.rank();
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < snf.rank; ++i) {
    if (snf.D(i, i) <= 1) continue;
    BigInt w = 0;
    for (std::size_t c = 0; c < t; ++c) w += BigInt(x.exponents[t - 1 - c]) * snf.V(c, i);
    BigInt r = w % snf.D(i, i);
    if (r < 0) r += snf.D(i, i);
    out.push_back(r.convert_to<std::uint64_t>());
  }
  return out;
}

}  // namespace abelian
