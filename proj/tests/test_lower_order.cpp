#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "pflow/errors.hpp"
#include "pflow/lower_order.hpp"
#include "pflow/random.hpp"

using namespace pflow;

TEST(LowerOrder, EvaluationExamples)
{
  EXPECT_EQ(d_eval(LowerOrderCoeff::zero(), 5.0), 0.0);
  EXPECT_DOUBLE_EQ(d_eval(LowerOrderCoeff::power(2.5), 4.0), 2.0);
  EXPECT_DOUBLE_EQ(d_eval(LowerOrderCoeff::power(4.0), -3.0), 9.0);
  EXPECT_DOUBLE_EQ(g_eval(LowerOrderCoeff::power(2.5), 4.0), 8.0);
  EXPECT_EQ(g_eval(LowerOrderCoeff::zero(), 7.0), 0.0);
  for (const auto& c : {LowerOrderCoeff::zero(), LowerOrderCoeff::power(3.0), LowerOrderCoeff::shifted_power(2.5, 2.0)})
    EXPECT_EQ(g_eval(c, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(d_eval(LowerOrderCoeff::shifted_power(4.0, 1.5), 2.0), 2.5);
}

TEST(LowerOrder, RejectsInvalidParameters)
{
  EXPECT_THROW(LowerOrderCoeff::power(2.0), DomainError);
  EXPECT_THROW(LowerOrderCoeff::power(INFINITY), DomainError);
  EXPECT_THROW(LowerOrderCoeff::shifted_power(3.0, -1.0), DomainError);
}

TEST(LowerOrder, AdmissibilityIntervals)
{
  EXPECT_TRUE(admissibility(LowerOrderCoeff::power(2.5), 1.5, SchemeKind::SemiImplicit));
  EXPECT_FALSE(admissibility(LowerOrderCoeff::power(2.6), 1.5, SchemeKind::SemiImplicit));
  EXPECT_TRUE(admissibility(LowerOrderCoeff::power(3.0), 1.5, SchemeKind::Implicit));
  EXPECT_FALSE(admissibility(LowerOrderCoeff::power(3.01), 1.5, SchemeKind::Implicit));
  // p = 2: semi-implicit range is open at 3, implicit is (2, 4]
  EXPECT_TRUE(admissibility(LowerOrderCoeff::power(2.99), 2.0, SchemeKind::SemiImplicit));
  EXPECT_FALSE(admissibility(LowerOrderCoeff::power(3.0), 2.0, SchemeKind::SemiImplicit));
  EXPECT_TRUE(admissibility(LowerOrderCoeff::power(4.0), 2.0, SchemeKind::Implicit));
  EXPECT_TRUE(admissibility(LowerOrderCoeff::zero(), 1.1, SchemeKind::SemiImplicit));
  EXPECT_THROW(admissibility(LowerOrderCoeff::zero(), 1.0, SchemeKind::Implicit), DomainError);
  EXPECT_THROW(admissibility(LowerOrderCoeff::zero(), 2.1, SchemeKind::Implicit), DomainError);
}

TEST(LowerOrder, StructuralBoundsOnSamples)
{
  Rng rng(99);
  const LowerOrderCoeff coeffs[] = {LowerOrderCoeff::zero(), LowerOrderCoeff::power(2.5),
                                    LowerOrderCoeff::power(3.7), LowerOrderCoeff::shifted_power(2.8, 0.4),
                                    LowerOrderCoeff::shifted_power(3.2, 3.0)};
  for (const auto& c : coeffs) {
    const double r = c.is_zero() ? 2.0 : c.r();
    for (int i = 0; i < 100000; ++i) {
      const double s = rng.uniform(-50.0, 50.0);
      const double d = c.d(s);
      ASSERT_GE(d, -c.c7()) << c.describe();
      ASSERT_LE(std::abs(d), c.c8() * (1.0 + std::pow(std::abs(s), r - 2.0))) << c.describe();
      ASSERT_LE(std::abs(c.g(s)), c.c9() * (1.0 + std::pow(std::abs(s), r - 1.0))) << c.describe();
    }
  }
  EXPECT_EQ(LowerOrderCoeff::shifted_power(3.0, 0.5).c7(), 0.5);
  EXPECT_EQ(LowerOrderCoeff::shifted_power(3.0, 0.5).c8(), 1.0);
  EXPECT_EQ(LowerOrderCoeff::shifted_power(3.0, 4.0).c8(), 4.0);
}

TEST(LowerOrder, GIsContinuousAndDerivativeMatches)
{
  Rng rng(4);
  for (const auto& c : {LowerOrderCoeff::power(2.5), LowerOrderCoeff::shifted_power(3.3, 1.2)}) {
    for (int i = 0; i < 1000; ++i) {
      const double s = rng.uniform(-5.0, 5.0);
      EXPECT_LT(std::abs(c.g(s + 1e-9) - c.g(s)), 1e-7);
      if (std::abs(s) < 1e-3) continue;
      const double h = 1e-6;
      const double fd = (c.g(s + h) - c.g(s - h)) / (2 * h);
      EXPECT_NEAR(c.g_derivative(s), fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(LowerOrder, Describe)
{
  EXPECT_EQ(LowerOrderCoeff::zero().describe(), "zero");
  EXPECT_EQ(LowerOrderCoeff::power(2.5).describe(), "power(r=2.5)");
  EXPECT_EQ(std::string(to_string(SchemeKind::SemiImplicit)), "semi-implicit");
}
