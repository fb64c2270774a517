#include <cmath>

#include <gtest/gtest.h>

#include "pflow/certification.hpp"
#include "pflow/errors.hpp"

using namespace pflow;

namespace {

const char* const kInequalityRows[] = {"monotonicity", "uniform-eps-bound", "orlicz-stability", "kappa-bracket",
                                       "weight-nonincreasing"};

}  // namespace

TEST(Certification, SmallRunHasNoViolations)
{
  const CertificationReport report = certify_lemmas(42, 20000);
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.seed, 42u);
  for (const char* name : kInequalityRows) {
    const CertificationRow& row = report.row(name);
    EXPECT_FALSE(row.measured) << name;
    EXPECT_EQ(row.samples, 20000u) << name;
    EXPECT_EQ(row.violations, 0u) << name;
  }
}

TEST(Certification, MeasuredRowsArePositiveAndBounded)
{
  const CertificationReport report = certify_lemmas(7, 20000);
  for (const char* name : {"lagged-weight-ratio", "equivalence-inner/shifted-phi", "equivalence-inner/quotient",
                           "equi-sandwich", "regularized-lipschitz"}) {
    const CertificationRow& row = report.row(name);
    EXPECT_TRUE(row.measured) << name;
    EXPECT_TRUE(std::isfinite(row.max_value)) << name;
    EXPECT_GE(row.min_value, 0.0) << name;
    EXPECT_LE(row.min_value, row.max_value) << name;
  }
  // |w(a) - w(b)| |a| <= 2 w(b) |a - b| up to the implicit constant; the samples stay far below 3
  EXPECT_LE(report.row("lagged-weight-ratio").max_value, 3.0);
  // inner product versus quotient form: bounded above and below independently of alpha
  EXPECT_GT(report.row("equivalence-inner/quotient").min_value, 0.1);
  EXPECT_LT(report.row("equivalence-inner/quotient").max_value, 10.0);
}

TEST(Certification, DeterministicForSeed)
{
  const CertificationReport a = certify_lemmas(123, 5000);
  const CertificationReport b = certify_lemmas(123, 5000);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].name, b.rows[i].name);
    EXPECT_EQ(a.rows[i].violations, b.rows[i].violations);
    EXPECT_EQ(a.rows[i].min_value, b.rows[i].min_value);
    EXPECT_EQ(a.rows[i].max_value, b.rows[i].max_value);
  }
  const CertificationReport c = certify_lemmas(124, 5000);
  EXPECT_NE(a.row("regularized-lipschitz").max_value, c.row("regularized-lipschitz").max_value);
}

TEST(Certification, RejectsBadGrid)
{
  CertificationGrid grid;
  grid.exponents.clear();
  EXPECT_THROW(certify_lemmas(1, 10, grid), DomainError);
  grid = {};
  grid.eps_min = 0.0;
  EXPECT_THROW(certify_lemmas(1, 10, grid), DomainError);
  EXPECT_THROW(certify_lemmas(1, 10).row("no-such-row"), std::out_of_range);
}

TEST(Certification, RegularizedLipschitzConstants)
{
  // S_eps is the identity for p = 2
  EXPECT_DOUBLE_EQ(regularized_lipschitz_constant(2.0), 1.0);
  // frozen regression brackets for the measured constants
  EXPECT_NEAR(regularized_lipschitz_constant(1.2), 1.489, 0.01);
  EXPECT_NEAR(regularized_lipschitz_constant(1.5), 1.2185, 0.01);
  EXPECT_NEAR(regularized_lipschitz_constant(1.8), 1.073, 0.01);
  // grows as p decreases
  EXPECT_GT(regularized_lipschitz_constant(1.2), regularized_lipschitz_constant(1.5));
  EXPECT_GT(regularized_lipschitz_constant(1.5), regularized_lipschitz_constant(1.8));
}
