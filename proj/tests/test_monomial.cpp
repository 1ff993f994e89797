#include <gtest/gtest.h>

#include "abelian/deterministic_generators.hpp"
#include "abelian/monomial_group.hpp"
#include "support/brute_force.hpp"

using namespace abelian;

namespace {

Presentation worked_example() { return Presentation{{4, 3, 3}, {{}, {3}, {2, 1}}}; }

}  // namespace

TEST(Monomial, WorkedExampleProduct) {
  const auto p = worked_example();
  const auto r = multiply(p, Monomial{{2, 2, 2}}, Monomial{{3, 1, 2}});
  EXPECT_EQ(r, (Monomial{{2, 1, 1}}));
  EXPECT_EQ(format_monomial(r), "x1^2 x2^1 x3^1");
}

TEST(Monomial, ReduceHandlesNegativeAndLargeExponents) {
  const auto p = worked_example();
  // x3^-1: x3^3 = x1^2 x2, so x3^-1 = x3^2 x1^-2 x2^-1, then reduce x2^-1 via x2^3 = x1^3.
  const auto inv = reduce(p, std::vector<std::int64_t>{0, 0, -1});
  EXPECT_EQ(multiply(p, inv, Monomial{{0, 0, 1}}), identity(p));
  const auto big = reduce(p, std::vector<std::int64_t>{0, 0, 36 * 1000 + 1});
  EXPECT_EQ(big, (Monomial{{0, 0, 1}}));
}

TEST(Monomial, BigIntReductionAgreesWithMachineIntegers) {
  const auto p = worked_example();
  for (std::int64_t a = -40; a <= 40; a += 7)
    for (std::int64_t b = -40; b <= 40; b += 9) {
      const auto m1 = reduce(p, std::vector<std::int64_t>{a, b, a - b});
      const auto m2 = reduce(p, std::vector<BigInt>{BigInt(a), BigInt(b), BigInt(a - b)});
      EXPECT_EQ(m1, m2);
    }
  BigInt huge = BigInt(1) << 200;
  huge *= 36;
  EXPECT_EQ(reduce(p, std::vector<BigInt>{huge + 1, 0, 0}), (Monomial{{1, 0, 0}}));
}

TEST(Monomial, PowerAndInverse) {
  const auto p = worked_example();
  const Monomial a{{1, 2, 1}};
  Monomial acc = identity(p);
  for (std::uint64_t m = 0; m < 40; ++m) {
    EXPECT_EQ(power(p, a, m), acc);
    acc = multiply(p, acc, a);
  }
  EXPECT_EQ(multiply(p, a, inverse(p, a)), identity(p));
}

TEST(Monomial, ElementOrdersMatchTheConcreteGroup) {
  GroupOracle o(make_group({4, 6, 3}, 21), Model::FS);
  const auto chain = generator_plus(o).first;
  const auto p = to_presentation(chain);
  for (std::uint64_t i = 0; i < p.order(); i += 5) {
    std::vector<std::uint64_t> e(p.rank());
    std::uint64_t rest = i;
    for (std::size_t j = 0; j < p.rank(); ++j) {
      e[j] = rest % p.orders[j];
      rest /= p.orders[j];
    }
    const Monomial m{e};
    EXPECT_EQ(element_order(p, m), brute::order(o.spec(), psi(p, chain, o, m)));
  }
}

TEST(Monomial, TrackedIntermediatesStayBounded) {
  const auto p = worked_example();
  ReduceStats stats;
  multiply(p, Monomial{{3, 2, 2}}, Monomial{{3, 2, 2}}, &stats);
  EXPECT_GT(stats.max_abs, 0);
  EXPECT_LE(stats.max_abs, 36);
}

TEST(Monomial, ExtremeExponentsReduceExactly) {
  // x2^2 = x1 makes this Z_4 generated by x2, and x1 x2 = x2^3.
  Presentation q{{2, 2}, {{}, {1}}};
  const std::uint64_t m = std::numeric_limits<std::uint64_t>::max();  // 3 mod 4
  EXPECT_EQ(power(q, Monomial{{1, 1}}, m), (Monomial{{0, 1}}));
  const std::uint64_t k = std::uint64_t{1} << 62;
  Presentation p{{k, 2}, {{}, {k - 1}}};
  const auto r = reduce(p, std::vector<std::int64_t>{0, std::numeric_limits<std::int64_t>::max()});
  EXPECT_EQ(r.exponents[1], 1u);
  EXPECT_LT(r.exponents[0], k);
}

TEST(Presentation, TextRoundTrip) {
  const auto p = worked_example();
  const auto s = format_presentation(p);
  EXPECT_EQ(s, "K=4,3,3; L[2,1]=3 L[3,1]=2 L[3,2]=1");
  EXPECT_EQ(parse_presentation(s), p);
  EXPECT_EQ(parse_presentation("K=5;"), (Presentation{{5}, {{}}}));
}

TEST(Presentation, ValidationCatchesBadInput) {
  EXPECT_THROW(parse_presentation("K=4,3; L[2,1]=4"), InvalidSpecError);
  EXPECT_THROW(parse_presentation("K=4,1"), InvalidSpecError);
  EXPECT_THROW(parse_presentation("K=4,3; L[1,2]=1"), InvalidSpecError);
  EXPECT_THROW(parse_presentation("4,3"), InvalidSpecError);
  EXPECT_THROW((Presentation{{4, 3}, {{}}}).validate(), InvalidSpecError);
}

TEST(Psi, RejectsAMismatchedChain) {
  GroupOracle o(make_group({4, 3, 3}, 1), Model::FS);
  const auto chain = generator_plus(o).first;
  EXPECT_THROW(psi(worked_example(), chain.prefix(1), o, Monomial{{1, 0, 0}}), ContractError);
}

TEST(Psi, TrivialPresentation) {
  GroupOracle o(make_group({}, 1), Model::FS);
  const auto chain = generator_plus(o).first;
  const auto p = to_presentation(chain);
  EXPECT_EQ(psi(p, chain, o, identity(p)), chain.identity);
  EXPECT_EQ(format_monomial(identity(p)), "1");
}
