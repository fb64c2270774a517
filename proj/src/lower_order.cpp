#include "pflow/lower_order.hpp"

#include <cmath>
#include <sstream>

#include "pflow/errors.hpp"

namespace pflow {

const char* to_string(SchemeKind kind)
{
  return kind == SchemeKind::Implicit ? "implicit" : "semi-implicit";
}

LowerOrderCoeff LowerOrderCoeff::zero()
{
  return {Kind::Zero, 0.0, 0.0};
}

LowerOrderCoeff LowerOrderCoeff::power(double r)
{
  if (!(r > 2.0) || !std::isfinite(r)) throw DomainError("power coefficient requires finite r > 2");
  return {Kind::Power, r, 0.0};
}

LowerOrderCoeff LowerOrderCoeff::shifted_power(double r, double c)
{
  if (!(r > 2.0) || !std::isfinite(r)) throw DomainError("shifted-power coefficient requires finite r > 2");
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("shifted-power coefficient requires finite c >= 0");
  return {Kind::ShiftedPower, r, c};
}

double LowerOrderCoeff::d(double s) const
{
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Power: return std::pow(std::abs(s), r_ - 2.0);
    case Kind::ShiftedPower: return std::pow(std::abs(s), r_ - 2.0) - c_;
  }
  return 0.0;
}

double LowerOrderCoeff::g(double s) const
{
  return d(s) * s;
}

double LowerOrderCoeff::g_derivative(double s) const
{
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Power: return (r_ - 1.0) * std::pow(std::abs(s), r_ - 2.0);
    case Kind::ShiftedPower: return (r_ - 1.0) * std::pow(std::abs(s), r_ - 2.0) - c_;
  }
  return 0.0;
}

double LowerOrderCoeff::c7() const
{
  return kind_ == Kind::ShiftedPower ? c_ : 0.0;
}

double LowerOrderCoeff::c8() const
{
  return kind_ == Kind::ShiftedPower ? std::max(1.0, c_) : 1.0;
}

std::string LowerOrderCoeff::describe() const
{
  std::ostringstream out;
  switch (kind_) {
    case Kind::Zero: out << "zero"; break;
    case Kind::Power: out << "power(r=" << r_ << ")"; break;
    case Kind::ShiftedPower: out << "shifted-power(r=" << r_ << ", c=" << c_ << ")"; break;
  }
  return out.str();
}

double d_eval(const LowerOrderCoeff& coeff, double s)
{
  return coeff.d(s);
}

double g_eval(const LowerOrderCoeff& coeff, double s)
{
  return coeff.g(s);
}

bool admissibility(const LowerOrderCoeff& coeff, double p, SchemeKind scheme)
{
  constexpr double dim = 2.0;
  if (!(p > 2.0 * dim / (dim + 2.0) && p <= 2.0))
    throw DomainError("admissibility: p must lie in (2d/(d+2), 2] = (1, 2]");
  if (coeff.is_zero()) return true;
  const double r = coeff.r();
  if (scheme == SchemeKind::Implicit) return r > 2.0 && r <= p * (dim + 2.0) / dim;
  if (p == 2.0) return r > 2.0 && r < 3.0;
  return r > 2.0 && r <= p * (dim + 2.0) / (2.0 * dim) + 1.0;
}

}  // namespace pflow
