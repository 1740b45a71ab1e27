#include "dsa/field.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace dsa {
namespace {

TEST(FpTest, AddExamples) {
  EXPECT_EQ((Fp(2, 5) + Fp(3, 5)).value(), 0u);  // 5 wraps to 0
  EXPECT_EQ((Fp(0, 11) + Fp(7, 11)), Fp(7, 11));
  EXPECT_EQ((Fp(7, 11) + Fp(9, 11)).value(), (7u + 9u) % 11u);
}

TEST(FpTest, MulExamples) {
  EXPECT_EQ(Fp(1, 11) * Fp(8, 11), Fp(8, 11));
  EXPECT_EQ((Fp(3, 11) * Fp(4, 11)).value(), 1u);
  EXPECT_EQ((Fp(2, 5) * Fp(3, 5)).value(), 1u);  // 6 mod 5
}

// Brute-force inverse oracle: scan the whole field.
std::uint64_t brute_force_inv(std::uint64_t a, std::uint64_t q) {
  for (std::uint64_t x = 1; x < q; ++x) {
    if (a * x % q == 1) return x;
  }
  ADD_FAILURE() << a << " has no inverse mod " << q;
  return 0;
}

TEST(FpTest, InvExamples) {
  EXPECT_EQ(Fp(1, 11).inv(), Fp(1, 11));
  EXPECT_EQ(brute_force_inv(3, 11), 4u);
  EXPECT_EQ(Fp(3, 11).inv().value(), 4u);
  EXPECT_EQ(brute_force_inv(2, 5), 3u);
  EXPECT_EQ(Fp(2, 5).inv().value(), 3u);
  EXPECT_THROW(Fp(0, 11).inv(), DivisionByZeroError);
}

TEST(FpTest, ValueAlwaysReduced) {
  EXPECT_EQ(Fp(16, 11).value(), 5u);
  EXPECT_EQ(Fp(11, 11).value(), 0u);
}

TEST(FpTest, ModulusMismatchIsUsageError) {
  EXPECT_THROW(Fp(1, 5) + Fp(1, 7), UsageError);
  EXPECT_THROW(Fp(1, 5) * Fp(1, 7), UsageError);
  EXPECT_THROW(Fp(1, 5) - Fp(1, 7), UsageError);
}

TEST(FpTest, FieldAxiomsOnRandomTriples) {
  Rng rng(1234);
  const std::vector<std::uint64_t> moduli{5, 11, 65537};
  for (std::uint64_t q : moduli) {
    for (int i = 0; i < 4000; ++i) {
      const Fp a = rng.field_element(q);
      const Fp b = rng.field_element(q);
      const Fp c = rng.field_element(q);
      ASSERT_EQ((a + b) + c, a + (b + c));
      ASSERT_EQ((a * b) * c, a * (b * c));
      ASSERT_EQ(a + b, b + a);
      ASSERT_EQ(a * b, b * a);
      ASSERT_EQ(a * (b + c), a * b + a * c);
      if (!a.is_zero()) ASSERT_EQ(a * a.inv(), Fp(1, q));
    }
  }
}

TEST(FpTest, PowMatchesSquareAndMultiplyOracle) {
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    const Fp a = rng.field_element(65537);
    const std::uint64_t e = rng.below(1000);
    ASSERT_EQ(a.pow(e).value(), dsa_test::pow_u64(a.value(), e, 65537));
  }
}

TEST(PrimalityTest, ChecksModuli) {
  EXPECT_TRUE(is_prime(2));
  EXPECT_TRUE(is_prime(3));
  EXPECT_TRUE(is_prime(5));
  EXPECT_TRUE(is_prime(65537));
  EXPECT_FALSE(is_prime(1));
  EXPECT_FALSE(is_prime(9));
  EXPECT_FALSE(is_prime(65536));
  EXPECT_THROW(checked_modulus(6), UsageError);
  EXPECT_THROW(checked_modulus(1), UsageError);
  EXPECT_EQ(checked_modulus(65537), 65537u);
}

TEST(FpVecTest, ArithmeticAndErrors) {
  const FpVec a = FpVec::of(11, {1, 2, 3});
  const FpVec b = FpVec::of(11, {10, 10, 10});
  EXPECT_EQ(a + b, FpVec::of(11, {0, 1, 2}));
  EXPECT_EQ(a - b, FpVec::of(11, {2, 3, 4}));
  EXPECT_EQ(a.dot(b).value(), (10u + 20u + 30u) % 11u);
  EXPECT_THROW(a + FpVec::of(11, {1, 2}), UsageError);
  EXPECT_THROW(a + FpVec::of(5, {1, 2, 3}), UsageError);
  EXPECT_EQ(concat(a, b).size(), 6u);
}

TEST(RngTest, EmptyDraw) {
  Rng rng(7);
  EXPECT_TRUE(rng.field_vector(11, 0).empty());
}

TEST(RngTest, DeterministicGivenSeed) {
  const FpVec a = Rng(42).field_vector(65537, 100);
  const FpVec b = Rng(42).field_vector(65537, 100);
  EXPECT_EQ(a, b);
  const FpVec c = Rng(43).field_vector(65537, 100);
  EXPECT_NE(a, c);
}

TEST(RngTest, ChildStreamsAreIndependentOfDrawOrder) {
  Rng parent(5);
  parent.next_u64();
  parent.next_u64();
  EXPECT_EQ(Rng(5).child(3).field_vector(11, 8), parent.child(3).field_vector(11, 8));
  EXPECT_NE(Rng(5).child(3).field_vector(11, 8), Rng(5).child(4).field_vector(11, 8));
}

TEST(RngTest, ChiSquareUniformityF11) {
  const std::size_t draws = 100000;
  Rng rng(2718);
  std::vector<std::size_t> counts(11, 0);
  for (std::size_t i = 0; i < draws; ++i) ++counts[rng.below(11)];
  const double expected = static_cast<double>(draws) / 11.0;
  double chi2 = 0.0;
  for (std::size_t c : counts) {
    const double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  // 10 degrees of freedom, alpha = 0.01
  EXPECT_LT(chi2, 23.209);
}

TEST(RngTest, ResidueFrequenciesWithinFiveSigma) {
  const std::size_t draws = 1000000;
  const std::uint64_t q = 11;
  Rng rng(31337);
  std::vector<std::size_t> counts(q, 0);
  for (std::size_t i = 0; i < draws; ++i) ++counts[rng.below(q)];
  const double p = 1.0 / static_cast<double>(q);
  const double mean = draws * p;
  const double sigma = std::sqrt(draws * p * (1.0 - p));
  for (std::uint64_t r = 0; r < q; ++r) {
    EXPECT_NEAR(static_cast<double>(counts[r]), mean, 5.0 * sigma) << "residue " << r;
  }
}

}  // namespace
}  // namespace dsa
