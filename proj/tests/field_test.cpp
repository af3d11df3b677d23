#include "circfuzz/field.hpp"

#include <gtest/gtest.h>

#include "circfuzz/campaign.hpp"
#include "circfuzz/errors.hpp"
#include "circfuzz/rng.hpp"

namespace circfuzz {
namespace {

ModulusPtr small() { return FieldModulus::create("65537"); }

FieldElement fe(std::uint64_t v, const ModulusPtr& m) { return FieldElement::from_u64(v, m); }

TEST(Modulus, AcceptsUsablePrimes) {
  EXPECT_EQ(small()->decimal(), "65537");
  EXPECT_EQ(FieldModulus::create(kBn254ScalarDec)->decimal(), kBn254ScalarDec);
}

TEST(Modulus, RejectsComposites) {
  EXPECT_THROW(FieldModulus::create("65536"), ConfigError);
  EXPECT_THROW(FieldModulus::create(
                   "21888242871839275222246405745257275088548364400416034343698204186575808495616"),
               ConfigError);
}

TEST(Modulus, RejectsSmallPrimes) {
  // 65521 is prime but below the size bound.
  EXPECT_THROW(FieldModulus::create("65521"), ConfigError);
  EXPECT_THROW(FieldModulus::create("7"), ConfigError);
}

TEST(Modulus, RejectsGarbage) {
  EXPECT_THROW(FieldModulus::create(""), ConfigError);
  EXPECT_THROW(FieldModulus::create("12x34"), ConfigError);
}

TEST(FieldElement, CanonicalReduction) {
  auto m = small();
  EXPECT_EQ(fe(65537, m).decimal(), "0");
  EXPECT_EQ(fe(65539, m).decimal(), "2");
  EXPECT_EQ(FieldElement::from_i64(-1, m).decimal(), "65536");
  EXPECT_EQ(FieldElement::from_decimal("131074", m).decimal(), "0");
}

TEST(FieldElement, RejectsNonDecimal) {
  EXPECT_THROW(FieldElement::from_decimal("abc", small()), ParseError);
}

TEST(FieldElement, MixedModuliAreAnError) {
  auto a = fe(3, small());
  auto b = fe(3, FieldModulus::create(kBn254ScalarDec));
  EXPECT_THROW(fe_add(a, b), ConfigError);
  EXPECT_THROW(fe_mul(a, b), ConfigError);
}

TEST(FieldElement, UninitializedIsAnError) {
  FieldElement blank;
  EXPECT_FALSE(blank.valid());
  EXPECT_THROW(fe_add(blank, blank), CircuitError);
}

TEST(Division, TotalWithZeroFlag) {
  auto m = small();
  auto [q0, flag0] = fe_div(fe(0, m), fe(0, m));
  EXPECT_TRUE(flag0);
  EXPECT_EQ(q0.decimal(), "0");

  auto [q1, flag1] = fe_div(fe(6, m), fe(3, m));
  EXPECT_FALSE(flag1);
  EXPECT_EQ(q1.decimal(), "2");

  // 1/2 = (p+1)/2; check 2 * 32769 = 65538 = 1 mod 65537.
  auto [q2, flag2] = fe_div(fe(1, m), fe(2, m));
  EXPECT_FALSE(flag2);
  EXPECT_EQ(q2.decimal(), "32769");
  EXPECT_EQ(fe_mul(q2, fe(2, m)), fe(1, m));
}

TEST(Inverse, ZeroThrows) {
  EXPECT_THROW(fe_inverse(fe(0, small())), CircuitError);
}

TEST(Inverse, RoundTripsOnRandomElements) {
  auto m = FieldModulus::create(kBn254ScalarDec);
  Rng rng(42);
  for (int k = 0; k < 200; ++k) {
    FieldElement a = fe(rng.next() | 1, m);  // nonzero
    EXPECT_EQ(fe_mul(a, fe_inverse(a)), fe(1, m));
    EXPECT_EQ(fe_div(a, a).first, fe(1, m));
  }
}

TEST(Algebra, RandomizedLaws) {
  auto m = small();
  Rng rng(7);
  for (int k = 0; k < 500; ++k) {
    FieldElement a = fe(rng.next(), m), b = fe(rng.next(), m), c = fe(rng.next(), m);
    EXPECT_EQ(fe_add(a, b), fe_add(b, a));
    EXPECT_EQ(fe_mul(a, b), fe_mul(b, a));
    EXPECT_EQ(fe_mul(a, fe_add(b, c)), fe_add(fe_mul(a, b), fe_mul(a, c)));
    EXPECT_EQ(fe_add(a, fe_neg(a)).decimal(), "0");
    EXPECT_EQ(fe_sub(a, b), fe_add(a, fe_neg(b)));
    if (!b.is_zero()) EXPECT_EQ(fe_div(a, b).first, fe_mul(a, fe_inverse(b)));
  }
}

}  // namespace
}  // namespace circfuzz
