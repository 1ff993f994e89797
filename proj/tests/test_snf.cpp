#include <gtest/gtest.h>

#include "abelian/deterministic_generators.hpp"
#include "abelian/ground_truth.hpp"
#include "abelian/snf_basis.hpp"
#include "support/brute_force.hpp"

using namespace abelian;

namespace {

Presentation worked_example() { return Presentation{{4, 3, 3}, {{}, {3}, {2, 1}}}; }

void expect_valid_snf(const IntegerMatrix& R, const SnfResult& s) {
  EXPECT_EQ(s.U * R * s.V, s.D);
  EXPECT_TRUE(s.D.is_diagonal());
  EXPECT_EQ(s.V * s.V_inverse, IntegerMatrix::identity(R.cols()));
  EXPECT_EQ(brute::smith_diagonal_by_minors(R), s.diagonal()) << R.to_string();
}

}  // namespace

TEST(RelationMatrix, WorkedExampleLayout) {
  const IntegerMatrix R = build_relation_matrix(worked_example());
  const IntegerMatrix want{{-3, 1, 2}, {0, -3, 3}, {0, 0, -4}};
  EXPECT_EQ(R, want);
  EXPECT_EQ(abs(R.determinant()), 36);
}

TEST(RelationMatrix, TrivialPresentationIsRejected) {
  EXPECT_THROW(build_relation_matrix(Presentation{}), ContractError);
  EXPECT_TRUE(invariant_factors(Presentation{}).empty());
}

TEST(Snf, WorkedExampleIsCyclicOfOrder36) {
  const auto p = worked_example();
  const IntegerMatrix R = build_relation_matrix(p);
  const SnfResult s = smith_normal_form(R);
  expect_valid_snf(R, s);
  EXPECT_EQ(invariant_factors(s), (std::vector<std::uint64_t>{36}));
  const auto basis = basis_from_snf(p, s);
  ASSERT_EQ(basis.size(), 1u);
  EXPECT_EQ(element_order(p, basis[0]), 36u);
}

TEST(Snf, KnownSmallMatrices) {
  const std::vector<std::pair<IntegerMatrix, std::vector<long long>>> cases = {
      {IntegerMatrix{{2, 0}, {0, 3}}, {1, 6}},
      {IntegerMatrix{{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}}, {2, 6, 12}},
      {IntegerMatrix{{0, 0}, {0, 0}}, {0, 0}},
      {IntegerMatrix{{6}}, {6}},
      {IntegerMatrix{{-6}}, {6}},
      {IntegerMatrix{{1, 2, 3}, {4, 5, 6}}, {1, 3}},
      {IntegerMatrix{{4, 0}, {0, 6}, {0, 0}}, {2, 12}},
  };
  for (const auto& [R, want] : cases) {
    const SnfResult s = smith_normal_form(R);
    expect_valid_snf(R, s);
    std::vector<BigInt> w(want.begin(), want.end());
    EXPECT_EQ(s.diagonal(), w) << R.to_string();
  }
}

TEST(Snf, LargeEntriesStayExact) {
  IntegerMatrix R(2, 2);
  R(0, 0) = BigInt(1) << 100;
  R(0, 1) = (BigInt(1) << 99) + 1;
  R(1, 1) = BigInt(3) << 90;
  const SnfResult s = smith_normal_form(R);
  EXPECT_EQ(s.U * R * s.V, s.D);
  EXPECT_EQ(s.D(0, 0) * s.D(1, 1), abs(R.determinant()));
}

TEST(Snf, EmptyMatrixIsRejected) { EXPECT_THROW(smith_normal_form(IntegerMatrix(0, 0)), ContractError); }

TEST(ExtendedGcd, BezoutIdentity) {
  for (long long a = -30; a <= 30; a += 7)
    for (long long b = -30; b <= 30; b += 5) {
      auto [g, s, t] = detail::extended_gcd(a, b);
      EXPECT_EQ(s * a + t * b, g);
      EXPECT_GE(g, 0);
      EXPECT_EQ(g, brute::gcd_big(a, b));
    }
}

TEST(Basis, OrdersAndCoordinatesOnConcreteGroups) {
  for (const auto& f : std::vector<std::vector<std::uint64_t>>{{2, 4}, {12}, {4, 3, 3}, {2, 2, 6, 12}, {9, 27, 5}}) {
    GroupOracle o(make_group(f, 3), Model::FS);
    const auto chain = generator_plus(o).first;
    const auto p = to_presentation(chain);
    const auto s = smith_normal_form(build_relation_matrix(p));
    const auto want = canonical_invariant_factors(f);
    EXPECT_EQ(invariant_factors(s), want) << format_group_spec(f);
    const auto basis = basis_from_snf(p, s);
    ASSERT_EQ(basis.size(), want.size());
    for (std::size_t i = 0; i < basis.size(); ++i)
      EXPECT_EQ(brute::order(o.spec(), psi(p, chain, o, basis[i])), want[i]);

    // coordinates of the basis elements themselves are unit vectors
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const auto c = basis_coordinates(p, s, basis[i]);
      for (std::size_t j = 0; j < c.size(); ++j) EXPECT_EQ(c[j], i == j ? 1u : 0u);
    }
    // prod y_i^{e_i} recovers x
    for (std::uint64_t idx = 0; idx < p.order(); idx += 3) {
      std::vector<std::uint64_t> e(p.rank());
      std::uint64_t rest = idx;
      for (std::size_t j = 0; j < p.rank(); ++j) {
        e[j] = rest % p.orders[j];
        rest /= p.orders[j];
      }
      const Monomial x{e};
      const auto c = basis_coordinates(p, s, x);
      Monomial acc = identity(p);
      for (std::size_t i = 0; i < c.size(); ++i) acc = multiply(p, acc, power(p, basis[i], c[i]));
      EXPECT_EQ(acc, x);
    }
  }
}

TEST(Basis, RejectsAForeignSnf) {
  const auto s = smith_normal_form(IntegerMatrix{{4}});
  EXPECT_THROW(basis_from_snf(worked_example(), s), ContractError);
}
