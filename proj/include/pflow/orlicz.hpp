#ifndef PFLOW_ORLICZ_HPP
#define PFLOW_ORLICZ_HPP

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "pflow/errors.hpp"

namespace pflow {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

using Vec2d = Vec2<double>;

/// How the degeneracy of the flux at a vanishing gradient is removed.
///
/// AdditiveShift replaces phi by the shifted N-function phi_eps, i.e. the
/// weight phi'(eps + |a|) / (eps + |a|).  QuadraticNorm evaluates the
/// density at the regularized length |a|_eps = sqrt(|a|^2 + eps^2), which
/// for delta = 0 gives the weight |a|_eps^{p-2}.
enum class Regularization { AdditiveShift, QuadraticNorm };

inline const char* to_string(Regularization kind)
{
  return kind == Regularization::AdditiveShift ? "additive-shift" : "quadratic-norm";
}

/// N-function with (p, delta)-structure,
///
///   phi'(t) = (delta + t)^{p-2} t,   phi(t) = int_0^t phi'(s) ds,
///
/// for p in (1, 2] and delta >= 0.  With this representative
/// r phi''(r) / phi'(r) = ((p-1) r + delta) / (delta + r), so the bracket
/// constants are kappa0 = p - 1 and kappa1 = 1.
///
/// Shifting by alpha only moves delta: phi_alpha has (p, delta + alpha)
/// structure, which keeps every shifted quantity in closed form.
template <typename Scalar>
class NFunction {
public:
  NFunction(Scalar p, Scalar delta) : p_(p), delta_(delta)
  {
    if (!(p > Scalar(1) && p <= Scalar(2)))
      throw DomainError("NFunction: exponent p must lie in (1, 2], got " + std::to_string(double(p)));
    if (!(delta >= Scalar(0)) || !std::isfinite(double(delta)))
      throw DomainError("NFunction: delta must be finite and >= 0");
  }

  Scalar p() const { return p_; }
  Scalar delta() const { return delta_; }
  Scalar kappa0() const { return p_ - Scalar(1); }
  Scalar kappa1() const { return Scalar(1); }

  /// phi_alpha, again an N-function with (p, delta + alpha)-structure.
  NFunction shifted(Scalar alpha) const
  {
    check_nonnegative(alpha, "shift");
    return NFunction(p_, delta_ + alpha);
  }

  Scalar value(Scalar t) const
  {
    check_nonnegative(t, "argument");
    using std::pow;
    if (t == Scalar(0)) return Scalar(0);
    if (delta_ == Scalar(0)) return pow(t, p_) / p_;
    const Scalar x = t / delta_;
    return pow(delta_, p_) * unit_value(x);
  }

  Scalar derivative(Scalar t) const
  {
    check_nonnegative(t, "argument");
    using std::pow;
    if (t == Scalar(0)) return Scalar(0);
    return pow(delta_ + t, p_ - Scalar(2)) * t;
  }

  /// phi''(t) = (delta + t)^{p-3} (delta + (p-1) t); +inf at t = 0 when delta = 0 and p < 2.
  Scalar second_derivative(Scalar t) const
  {
    check_nonnegative(t, "argument");
    using std::pow;
    if (p_ == Scalar(2)) return Scalar(1);
    if (t == Scalar(0) && delta_ == Scalar(0)) return std::numeric_limits<Scalar>::infinity();
    return pow(delta_ + t, p_ - Scalar(3)) * (delta_ + (p_ - Scalar(1)) * t);
  }

  /// phi'(t) / t, extended to t = 0 by its limit delta^{p-2} (+inf for delta = 0, p < 2).
  Scalar weight(Scalar t) const
  {
    check_nonnegative(t, "argument");
    using std::pow;
    if (p_ == Scalar(2)) return Scalar(1);
    if (t == Scalar(0) && delta_ == Scalar(0)) return std::numeric_limits<Scalar>::infinity();
    return pow(delta_ + t, p_ - Scalar(2));
  }

  /// d/dt of weight(t); used by the Newton Jacobian.
  Scalar weight_derivative(Scalar t) const
  {
    using std::pow;
    if (p_ == Scalar(2)) return Scalar(0);
    return (p_ - Scalar(2)) * pow(delta_ + t, p_ - Scalar(3));
  }

private:
  static void check_nonnegative(Scalar v, const char* what)
  {
    if (!(v >= Scalar(0)) || !std::isfinite(double(v)))
      throw DomainError(std::string("NFunction: ") + what + " must be finite and >= 0");
  }

  // g(x) = int_0^x (1+y)^{p-2} y dy, so that phi(t) = delta^p g(t / delta).
  Scalar unit_value(Scalar x) const
  {
    using std::pow;
    if (x < Scalar(0.25)) {
      // binomial series; the closed form cancels catastrophically for small x
      Scalar sum = Scalar(0);
      Scalar binom = Scalar(1);
      Scalar xp = x * x;
      for (int n = 0; n < 60; ++n) {
        const Scalar term = binom * xp / Scalar(n + 2);
        sum += term;
        using std::abs;
        if (abs(term) < Scalar(1e-18) * abs(sum)) break;
        binom *= (p_ - Scalar(2) - Scalar(n)) / Scalar(n + 1);
        xp *= x;
      }
      return sum;
    }
    const Scalar q = p_ - Scalar(1);
    return (pow(Scalar(1) + x, q) * (q * x - Scalar(1)) + Scalar(1)) / (p_ * q);
  }

  Scalar p_;
  Scalar delta_;
};

using NFunctionPD = NFunction<double>;

template <typename Scalar>
Scalar phi_eval(const NFunction<Scalar>& nf, Scalar t)
{
  return nf.value(t);
}

/// phi_alpha(t) in closed form.
template <typename Scalar>
Scalar phi_shifted(const NFunction<Scalar>& nf, Scalar alpha, Scalar t)
{
  return nf.shifted(alpha).value(t);
}

/// phi'_alpha(t) = phi'(alpha + t) t / (alpha + t) = (delta + alpha + t)^{p-2} t.
template <typename Scalar>
Scalar phi_shifted_prime(const NFunction<Scalar>& nf, Scalar alpha, Scalar t)
{
  return nf.shifted(alpha).derivative(t);
}

/// A_alpha(a) = phi'_alpha(|a|) / |a| * a, with A_alpha(0) = 0.
template <typename Derived>
Vec2<typename Derived::Scalar> op_A(const NFunction<typename Derived::Scalar>& nf,
                                     typename Derived::Scalar alpha,
                                     const Eigen::MatrixBase<Derived>& a)
{
  using Scalar = typename Derived::Scalar;
  const Scalar norm = a.norm();
  if (norm == Scalar(0)) return Vec2<Scalar>::Zero();
  return nf.shifted(alpha).weight(norm) * a;
}

/// S_eps(a) = a / |a|_eps^{2-p} with |a|_eps = (|a|^2 + eps^2)^{1/2}.
template <typename Derived>
Vec2<typename Derived::Scalar> op_S_eps(typename Derived::Scalar p,
                                         typename Derived::Scalar eps,
                                         const Eigen::MatrixBase<Derived>& a)
{
  using Scalar = typename Derived::Scalar;
  using std::pow;
  if (!(p > Scalar(1) && p <= Scalar(2))) throw DomainError("op_S_eps: p must lie in (1, 2]");
  if (p == Scalar(2)) return a;
  const Scalar sq = a.squaredNorm() + eps * eps;
  if (sq == Scalar(0)) return Vec2<Scalar>::Zero();
  return pow(sq, (p - Scalar(2)) / Scalar(2)) * a;
}

// -- regularized flux used by the schemes -----------------------------------

/// Flux weight w_eps(s) with flux w_eps(|a|) a; s = |a|.
///   AdditiveShift:  phi'_eps(s) / s = (delta + eps + s)^{p-2}
///   QuadraticNorm:  phi'(|a|_eps) / |a|_eps = (delta + |a|_eps)^{p-2}
template <typename Scalar>
Scalar regularized_weight(const NFunction<Scalar>& nf, Scalar eps, Regularization kind, Scalar s)
{
  using std::sqrt;
  if (kind == Regularization::AdditiveShift) return nf.shifted(eps).weight(s);
  return nf.weight(sqrt(s * s + eps * eps));
}

/// d/ds of regularized_weight.
template <typename Scalar>
Scalar regularized_weight_derivative(const NFunction<Scalar>& nf, Scalar eps, Regularization kind,
                                     Scalar s)
{
  using std::sqrt;
  if (kind == Regularization::AdditiveShift) return nf.shifted(eps).weight_derivative(s);
  const Scalar r = sqrt(s * s + eps * eps);
  if (r == Scalar(0)) return Scalar(0);
  return nf.weight_derivative(r) * s / r;
}

/// Potential of the regularized flux: phi_eps(s) or phi(|a|_eps).
template <typename Scalar>
Scalar regularized_density(const NFunction<Scalar>& nf, Scalar eps, Regularization kind, Scalar s)
{
  using std::sqrt;
  if (kind == Regularization::AdditiveShift) return nf.shifted(eps).value(s);
  return nf.value(sqrt(s * s + eps * eps));
}

template <typename Derived>
Vec2<typename Derived::Scalar> regularized_flux(const NFunction<typename Derived::Scalar>& nf,
                                                typename Derived::Scalar eps, Regularization kind,
                                                const Eigen::MatrixBase<Derived>& a)
{
  using Scalar = typename Derived::Scalar;
  const Scalar norm = a.norm();
  if (norm == Scalar(0)) return Vec2<Scalar>::Zero();
  return regularized_weight(nf, eps, kind, norm) * a;
}

// -- inequality checks ------------------------------------------------------

/// Scaled absolute tolerance: 1e-10 * max(1, |lhs|, |rhs|).
template <typename Scalar>
Scalar inequality_tolerance(Scalar lhs, Scalar rhs)
{
  using std::abs;
  using std::max;
  return Scalar(1e-10) * max({Scalar(1), abs(lhs), abs(rhs)});
}

template <typename Scalar>
struct InequalityCheck {
  Scalar lhs;
  Scalar rhs;
  bool holds;
};

/// |A_eps(a) - A_0(a)| <= (1 - kappa0) phi'(eps).
template <typename Derived>
InequalityCheck<typename Derived::Scalar> check_uniform_eps_bound(
    const NFunction<typename Derived::Scalar>& nf, const Eigen::MatrixBase<Derived>& a,
    typename Derived::Scalar eps)
{
  using Scalar = typename Derived::Scalar;
  if (!(eps > Scalar(0))) throw DomainError("check_uniform_eps_bound: eps must be > 0");
  const Scalar lhs = (op_A(nf, eps, a) - op_A(nf, Scalar(0), a)).norm();
  const Scalar rhs = (Scalar(1) - nf.kappa0()) * nf.derivative(eps);
  return {lhs, rhs, lhs <= rhs + inequality_tolerance(lhs, rhs)};
}

/// (phi'_eps(|a|)/|a|) b.(b - a) >= phi_eps(|b|) - phi_eps(|a|) + 1/2 (phi'_eps(|a|)/|a|) |b - a|^2.
///
/// When the weight at a is infinite (a = 0 with delta = eps = 0, p < 2) both
/// sides are +inf and the check is reported as holding.
template <typename DerivedA, typename DerivedB>
InequalityCheck<typename DerivedA::Scalar> check_orlicz_stability(
    const NFunction<typename DerivedA::Scalar>& nf, const Eigen::MatrixBase<DerivedA>& a,
    const Eigen::MatrixBase<DerivedB>& b, typename DerivedA::Scalar eps)
{
  using Scalar = typename DerivedA::Scalar;
  const NFunction<Scalar> shifted = nf.shifted(eps);
  const Vec2<Scalar> diff = b - a;
  const Scalar w = shifted.weight(a.norm());
  if (!std::isfinite(double(w))) {
    if (diff.squaredNorm() == Scalar(0)) return {Scalar(0), Scalar(0), true};
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    return {inf, inf, true};
  }
  const Scalar lhs = w * b.dot(diff);
  const Scalar rhs = shifted.value(b.norm()) - shifted.value(a.norm()) + Scalar(0.5) * w * diff.squaredNorm();
  return {lhs, rhs, lhs >= rhs - inequality_tolerance(lhs, rhs)};
}

template <typename Scalar>
struct LaggedWeightCheck {
  Scalar lhs;
  Scalar bound_unit;
  Scalar ratio;
};

/// lhs = |(phi'_eps(|a|)/|a| - phi'_eps(|b|)/|b|) a|, bound_unit = (phi'_eps(|b|)/|b|) |a - b|.
template <typename DerivedA, typename DerivedB>
LaggedWeightCheck<typename DerivedA::Scalar> check_lagged_weight_estimate(
    const NFunction<typename DerivedA::Scalar>& nf, const Eigen::MatrixBase<DerivedA>& a,
    const Eigen::MatrixBase<DerivedB>& b, typename DerivedA::Scalar eps)
{
  using Scalar = typename DerivedA::Scalar;
  if (b.norm() == Scalar(0)) throw DomainError("check_lagged_weight_estimate: b must be nonzero");
  const NFunction<Scalar> shifted = nf.shifted(eps);
  const Scalar wb = shifted.weight(b.norm());
  const Scalar bound_unit = wb * (a - b).norm();
  Scalar lhs = Scalar(0);
  using std::abs;
  if (a.norm() > Scalar(0)) lhs = abs(shifted.weight(a.norm()) - wb) * a.norm();
  const Scalar ratio = bound_unit > Scalar(0) ? lhs / bound_unit : Scalar(0);
  return {lhs, bound_unit, ratio};
}

template <typename Scalar>
struct MonotonicityCheck {
  Scalar inner;
  Scalar shifted_phi_val;
  Scalar quotient_form;
};

/// The three quantities of the monotonicity equivalence for A_alpha:
///   inner           = (A_alpha(a) - A_alpha(b)).(a - b)
///   shifted_phi_val = (phi_alpha)_{|a|}(|a - b|)
///   quotient_form   = phi'_alpha(|a|+|b|) / (|a|+|b|) |a - b|^2
template <typename DerivedA, typename DerivedB>
MonotonicityCheck<typename DerivedA::Scalar> check_monotonicity_equivalence(
    const NFunction<typename DerivedA::Scalar>& nf, const Eigen::MatrixBase<DerivedA>& a,
    const Eigen::MatrixBase<DerivedB>& b, typename DerivedA::Scalar alpha)
{
  using Scalar = typename DerivedA::Scalar;
  const Vec2<Scalar> diff = a - b;
  const Scalar dist = diff.norm();
  if (dist == Scalar(0)) throw DomainError("check_monotonicity_equivalence: a and b coincide");
  const Scalar inner = (op_A(nf, alpha, a) - op_A(nf, alpha, b)).dot(diff);
  // (phi_alpha)_{|a|} has (p, delta + alpha + |a|)-structure
  const Scalar shifted_phi_val = nf.shifted(alpha + a.norm()).value(dist);
  const Scalar sum = a.norm() + b.norm();
  const Scalar quotient_form = nf.shifted(alpha).weight(sum) * dist * dist;
  return {inner, shifted_phi_val, quotient_form};
}

}  // namespace pflow

#endif  // PFLOW_ORLICZ_HPP
