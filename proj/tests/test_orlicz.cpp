#include <cmath>
#include <limits>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "pflow/errors.hpp"
#include "pflow/orlicz.hpp"
#include "pflow/random.hpp"

using namespace pflow;

namespace {

// phi(t) by adaptive quadrature of the defining derivative (delta + s)^{p-2} s.
double phi_quadrature(double p, double delta, double t)
{
  auto integrand = [p, delta](double s) { return s == 0.0 ? 0.0 : std::pow(delta + s, p - 2.0) * s; };
  // tanh-sinh copes with the s^{p-1} endpoint singularity at delta = 0
  static boost::math::quadrature::tanh_sinh<double> rule;
  return rule.integrate(integrand, 0.0, t, 1e-15);
}

Vec2d random_vec(Rng& rng, double radius)
{
  const double r = rng.uniform(0.0, radius);
  const double angle = rng.uniform(0.0, 2.0 * M_PI);
  return {r * std::cos(angle), r * std::sin(angle)};
}

}  // namespace

TEST(NFunction, RejectsInvalidParameters)
{
  EXPECT_THROW(NFunctionPD(1.0, 0.0), DomainError);
  EXPECT_THROW(NFunctionPD(2.5, 0.0), DomainError);
  EXPECT_THROW(NFunctionPD(1.5, -0.1), DomainError);
  EXPECT_THROW(NFunctionPD(std::nan(""), 0.0), DomainError);
  EXPECT_NO_THROW(NFunctionPD(2.0, 0.0));
}

TEST(NFunction, PhiExamples)
{
  EXPECT_EQ(phi_eval(NFunctionPD(1.5, 0.0), 0.0), 0.0);
  EXPECT_NEAR(phi_eval(NFunctionPD(1.5, 0.0), 4.0), 16.0 / 3.0, 1e-13);
  EXPECT_NEAR(phi_eval(NFunctionPD(2.0, 0.0), 3.0), 4.5, 1e-14);
  EXPECT_THROW(phi_eval(NFunctionPD(1.5, 0.0), -1.0), DomainError);
  EXPECT_THROW(phi_eval(NFunctionPD(1.5, 0.0), std::numeric_limits<double>::infinity()), DomainError);
}

TEST(NFunction, PhiMatchesQuadratureOfDerivative)
{
  for (double p : {1.1, 1.2, 1.5, 1.8, 2.0})
    for (double delta : {0.0, 1e-3, 0.1, 1.0})
      for (double t : {1e-6, 1e-3, 0.02, 0.3, 1.0, 4.0, 25.0}) {
        const double exact = phi_quadrature(p, delta, t);
        EXPECT_NEAR(phi_eval(NFunctionPD(p, delta), t), exact, 1e-12 * std::max(1e-300, exact))
            << "p=" << p << " delta=" << delta << " t=" << t;
      }
}

TEST(NFunction, ShiftedPrimeExamples)
{
  EXPECT_DOUBLE_EQ(phi_shifted_prime(NFunctionPD(2.0, 0.0), 5.0, 7.0), 7.0);
  EXPECT_NEAR(phi_shifted_prime(NFunctionPD(1.5, 0.0), 1.0, 1.0), std::pow(2.0, -0.5), 1e-15);
  EXPECT_EQ(phi_shifted_prime(NFunctionPD(1.3, 0.2), 0.7, 0.0), 0.0);
  EXPECT_THROW(phi_shifted_prime(NFunctionPD(1.5, 0.0), -1.0, 1.0), DomainError);
}

TEST(NFunction, ShiftedPrimeEqualsComposition)
{
  // phi'_alpha(t) = phi'(alpha + t) t / (alpha + t)
  const NFunctionPD nf(1.4, 0.05);
  for (double alpha : {0.0, 0.01, 0.5, 3.0})
    for (double t : {1e-4, 0.2, 1.0, 7.0}) {
      const double composed = nf.derivative(alpha + t) * t / (alpha + t);
      EXPECT_NEAR(phi_shifted_prime(nf, alpha, t), composed, 1e-14 * composed);
    }
}

TEST(NFunction, SecondDerivativeMatchesFiniteDifference)
{
  for (double p : {1.2, 1.7, 2.0})
    for (double delta : {0.0, 0.3})
      for (double t : {0.05, 0.8, 3.0}) {
        const NFunctionPD nf(p, delta);
        const double h = 1e-6 * t;
        const double fd = (nf.derivative(t + h) - nf.derivative(t - h)) / (2 * h);
        EXPECT_NEAR(nf.second_derivative(t), fd, 1e-7 * std::abs(fd));
      }
}

TEST(NFunction, KappaBracketAndWeightMonotone)
{
  Rng rng(11);
  for (int i = 0; i < 100000; ++i) {
    const double p = rng.uniform(1.01, 2.0);
    const double delta = rng.uniform() < 0.5 ? 0.0 : rng.log_uniform(1e-4, 10.0);
    const NFunctionPD nf(p, delta);
    const double r = rng.log_uniform(1e-6, 1e3);
    const double d1 = nf.derivative(r);
    const double rd2 = r * nf.second_derivative(r);
    EXPECT_LE(nf.kappa0() * d1, rd2 * (1 + 1e-12));
    EXPECT_LE(rd2, nf.kappa1() * d1 * (1 + 1e-12));
    const double r2 = r * rng.uniform(1.0, 5.0);
    EXPECT_GE(nf.weight(r), nf.weight(r2) - 1e-12);
  }
}

TEST(Operators, OpAExamples)
{
  EXPECT_EQ(op_A(NFunctionPD(2.0, 0.0), 0.0, Vec2d(3, 4)), Vec2d(3, 4));
  const Vec2d a = op_A(NFunctionPD(1.5, 0.0), 0.0, Vec2d(4, 0));
  EXPECT_NEAR(a.x(), 2.0, 1e-15);
  EXPECT_EQ(a.y(), 0.0);
  EXPECT_EQ(op_A(NFunctionPD(1.3, 0.0), 0.7, Vec2d(0, 0)), Vec2d(0, 0));
}

TEST(Operators, OpSEpsExamples)
{
  EXPECT_EQ(op_S_eps(2.0, 0.3, Vec2d(1, 2)), Vec2d(1, 2));
  const Vec2d s0 = op_S_eps(1.5, 0.0, Vec2d(4, 0));
  const Vec2d a0 = op_A(NFunctionPD(1.5, 0.0), 0.0, Vec2d(4, 0));
  EXPECT_NEAR((s0 - a0).norm(), 0.0, 1e-15);
  EXPECT_NEAR(op_S_eps(1.5, 3.0, Vec2d(4, 0)).x(), 4.0 * std::pow(25.0, -0.25), 1e-14);
  EXPECT_NEAR(op_S_eps(1.5, 3.0, Vec2d(4, 0)).x(), 1.78885, 1e-5);
  EXPECT_THROW(op_S_eps(2.5, 0.1, Vec2d(1, 0)), DomainError);
}

TEST(Operators, QuadraticCaseCollapsesToIdentity)
{
  Rng rng(3);
  const NFunctionPD nf(2.0, 0.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec2d a = random_vec(rng, 10.0);
    const double alpha = rng.uniform(0.0, 5.0);
    EXPECT_EQ(op_A(nf, alpha, a), a);
    EXPECT_EQ(op_S_eps(2.0, alpha, a), a);
  }
}

TEST(Operators, OpAIsGradientOfShiftedPotential)
{
  Rng rng(5);
  const double h = 1e-6;
  for (int i = 0; i < 500; ++i) {
    const NFunctionPD nf(rng.uniform(1.1, 2.0), rng.uniform() < 0.5 ? 0.0 : 0.2);
    const double alpha = rng.uniform(0.0, 1.0);
    Vec2d a = random_vec(rng, 5.0);
    if (a.norm() < 0.1) a *= 10.0 / std::max(a.norm(), 1e-3);
    const NFunctionPD shifted = nf.shifted(alpha);
    Vec2d fd;
    for (int c = 0; c < 2; ++c) {
      Vec2d plus = a, minus = a;
      plus[c] += h;
      minus[c] -= h;
      fd[c] = (shifted.value(plus.norm()) - shifted.value(minus.norm())) / (2 * h);
    }
    const Vec2d exact = op_A(nf, alpha, a);
    EXPECT_NEAR((fd - exact).norm(), 0.0, 1e-5 * std::max(1.0, exact.norm()));
  }
}

TEST(Operators, TemplatedOnScalar)
{
  const NFunction<long double> nf(1.5L, 0.0L);
  const Vec2<long double> a(4.0L, 0.0L);
  EXPECT_NEAR(double(op_A(nf, 0.0L, a).x()), 2.0, 1e-18);
  EXPECT_NEAR(double(nf.value(4.0L)), 16.0 / 3.0, 1e-15);
  const NFunction<float> nff(1.5f, 0.0f);
  EXPECT_NEAR(nff.value(4.0f), 16.0f / 3.0f, 1e-5f);
}

TEST(RegularizedFlux, WeightsOfBothKinds)
{
  const NFunctionPD nf(1.5, 0.0);
  EXPECT_NEAR(regularized_weight(nf, 0.1, Regularization::AdditiveShift, 0.0), std::pow(0.1, -0.5), 1e-14);
  EXPECT_NEAR(regularized_weight(nf, 0.1, Regularization::QuadraticNorm, 0.0), std::pow(0.1, -0.5), 1e-14);
  // QuadraticNorm flux with delta = 0 is S_eps
  const Vec2d a(0.3, -1.2);
  EXPECT_NEAR((regularized_flux(nf, 0.2, Regularization::QuadraticNorm, a) - op_S_eps(1.5, 0.2, a)).norm(), 0.0,
              1e-15);
  // AdditiveShift flux is A_eps
  EXPECT_NEAR((regularized_flux(nf, 0.2, Regularization::AdditiveShift, a) - op_A(nf, 0.2, a)).norm(), 0.0, 1e-15);
  EXPECT_EQ(regularized_flux(nf, 0.2, Regularization::QuadraticNorm, Vec2d(0, 0)), Vec2d(0, 0));
}

TEST(RegularizedFlux, DensityIsPotentialOfFlux)
{
  for (auto kind : {Regularization::AdditiveShift, Regularization::QuadraticNorm})
    for (double p : {1.2, 1.6, 2.0})
      for (double s : {0.01, 0.4, 3.0}) {
        const NFunctionPD nf(p, 0.1);
        const double eps = 0.05, h = 1e-6 * s;
        const double fd = (regularized_density(nf, eps, kind, s + h) - regularized_density(nf, eps, kind, s - h)) / (2 * h);
        EXPECT_NEAR(fd, regularized_weight(nf, eps, kind, s) * s, 1e-6 * fd);
        const double dfd =
            (regularized_weight(nf, eps, kind, s + h) - regularized_weight(nf, eps, kind, s - h)) / (2 * h);
        EXPECT_NEAR(regularized_weight_derivative(nf, eps, kind, s), dfd, 1e-6 * std::abs(dfd) + 1e-12);
      }
}

TEST(LemmaChecks, UniformEpsBoundExamples)
{
  auto c = check_uniform_eps_bound(NFunctionPD(2.0, 0.0), Vec2d(1, 1), 0.5);
  EXPECT_EQ(c.lhs, 0.0);
  EXPECT_EQ(c.rhs, 0.0);
  EXPECT_TRUE(c.holds);
  c = check_uniform_eps_bound(NFunctionPD(1.5, 0.0), Vec2d(1, 0), 0.01);
  EXPECT_NEAR(c.lhs, std::abs(std::pow(1.01, -0.5) - 1.0), 1e-15);
  EXPECT_NEAR(c.lhs, 0.004963, 1e-6);
  EXPECT_NEAR(c.rhs, 0.05, 1e-15);
  EXPECT_TRUE(c.holds);
  c = check_uniform_eps_bound(NFunctionPD(1.2, 0.1), Vec2d(0, 0), 0.3);
  EXPECT_EQ(c.lhs, 0.0);
  EXPECT_TRUE(c.holds);
  EXPECT_THROW(check_uniform_eps_bound(NFunctionPD(1.5, 0.0), Vec2d(1, 0), 0.0), DomainError);
}

TEST(LemmaChecks, OrliczStabilityExamples)
{
  auto c = check_orlicz_stability(NFunctionPD(1.5, 0.0), Vec2d(0.3, 0.4), Vec2d(0.3, 0.4), 0.1);
  EXPECT_EQ(c.lhs, 0.0);
  EXPECT_NEAR(c.rhs, 0.0, 1e-16);
  EXPECT_TRUE(c.holds);
  c = check_orlicz_stability(NFunctionPD(2.0, 0.0), Vec2d(1, 0), Vec2d(2, 0), 0.0);
  EXPECT_DOUBLE_EQ(c.lhs, 2.0);
  EXPECT_DOUBLE_EQ(c.rhs, 2.0);
  EXPECT_TRUE(c.holds);
  c = check_orlicz_stability(NFunctionPD(1.5, 0.0), Vec2d(1, 0), Vec2d(0.5, 0), 0.1);
  EXPECT_TRUE(c.holds);
  EXPECT_GT(c.lhs, c.rhs);
}

TEST(LemmaChecks, LaggedWeightExamples)
{
  auto c = check_lagged_weight_estimate(NFunctionPD(1.5, 0.0), Vec2d(1, 2), Vec2d(1, 2), 0.1);
  EXPECT_EQ(c.lhs, 0.0);
  EXPECT_EQ(c.ratio, 0.0);
  c = check_lagged_weight_estimate(NFunctionPD(2.0, 0.3), Vec2d(5, 1), Vec2d(-1, 2), 0.2);
  EXPECT_EQ(c.lhs, 0.0);
  EXPECT_EQ(c.ratio, 0.0);
  c = check_lagged_weight_estimate(NFunctionPD(1.5, 0.0), Vec2d(2, 0), Vec2d(1, 0), 0.05);
  // scalar oracle: |w(2) - w(1)| * 2 / (w(1) * 1) with w(s) = (0.05 + s)^{-1/2}
  const double w1 = std::pow(1.05, -0.5), w2 = std::pow(2.05, -0.5);
  EXPECT_NEAR(c.ratio, std::abs(w2 - w1) * 2.0 / w1, 1e-14);
  EXPECT_LE(c.ratio, 2.0);
  EXPECT_THROW(check_lagged_weight_estimate(NFunctionPD(1.5, 0.0), Vec2d(1, 0), Vec2d(0, 0), 0.1), DomainError);
}

TEST(LemmaChecks, MonotonicityEquivalenceExamples)
{
  auto m = check_monotonicity_equivalence(NFunctionPD(2.0, 0.0), Vec2d(1, 0), Vec2d(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(m.inner, 2.0);
  EXPECT_DOUBLE_EQ(m.quotient_form, 2.0);
  m = check_monotonicity_equivalence(NFunctionPD(2.0, 0.0), Vec2d(1, 0), Vec2d(-1, 0), 0.0);
  EXPECT_DOUBLE_EQ(m.inner, 4.0);
  EXPECT_THROW(check_monotonicity_equivalence(NFunctionPD(1.5, 0.0), Vec2d(1, 0), Vec2d(1, 0), 0.0), DomainError);

  Rng rng(8);
  const NFunctionPD nf(1.5, 0.1);
  for (int i = 0; i < 10000; ++i) {
    const Vec2d a = random_vec(rng, 10.0), b = random_vec(rng, 10.0);
    m = check_monotonicity_equivalence(nf, a, b, 0.3);
    EXPECT_GT(m.inner, 0.0);
    EXPECT_GT(m.shifted_phi_val, 0.0);
    EXPECT_GT(m.quotient_form, 0.0);
  }
}

TEST(LemmaChecks, UniformBoundAndStabilityOnRandomSamples)
{
  Rng rng(2024);
  const double exponents[] = {1.2, 1.5, 1.8, 2.0};
  for (int i = 0; i < 100000; ++i) {
    const NFunctionPD nf(exponents[rng.index(4)], rng.uniform() < 0.5 ? 0.0 : 0.1);
    const double eps = rng.log_uniform(1e-6, 1.0);
    const Vec2d a = random_vec(rng, 10.0), b = random_vec(rng, 10.0);
    ASSERT_TRUE(check_uniform_eps_bound(nf, a, eps).holds);
    ASSERT_TRUE(check_orlicz_stability(nf, a, b, eps).holds);
    // the same inequality for the QuadraticNorm potential phi(|a|_eps)
    const double wa = regularized_weight(nf, eps, Regularization::QuadraticNorm, a.norm());
    const double lhs = wa * b.dot(b - a);
    const double rhs = regularized_density(nf, eps, Regularization::QuadraticNorm, b.norm()) -
                       regularized_density(nf, eps, Regularization::QuadraticNorm, a.norm()) +
                       0.5 * wa * (b - a).squaredNorm();
    ASSERT_GE(lhs, rhs - inequality_tolerance(lhs, rhs));
  }
}
