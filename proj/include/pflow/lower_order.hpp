#ifndef PFLOW_LOWER_ORDER_HPP
#define PFLOW_LOWER_ORDER_HPP

#include <string>

namespace pflow {

enum class SchemeKind { Implicit, SemiImplicit };

const char* to_string(SchemeKind kind);

/// Coefficient d of the lower-order term d(u) u.  Closed registry:
///
///   Zero              d(s) = 0
///   Power(r)          d(s) = |s|^{r-2}
///   ShiftedPower(r,c) d(s) = |s|^{r-2} - c
///
/// with r > 2 and c >= 0.  Each kind declares the constants of the
/// structural bounds d(s) >= -c7 and |d(s)| <= c8 (1 + |s|^{r-2}).
class LowerOrderCoeff {
public:
  enum class Kind { Zero, Power, ShiftedPower };

  static LowerOrderCoeff zero();
  static LowerOrderCoeff power(double r);
  static LowerOrderCoeff shifted_power(double r, double c);

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::Zero; }
  double r() const { return r_; }
  double c() const { return c_; }

  double d(double s) const;
  /// g(s) = d(s) s.
  double g(double s) const;
  /// g'(s), for the Newton Jacobian.
  double g_derivative(double s) const;

  double c7() const;
  double c8() const;
  /// |g(s)| <= c9 (1 + |s|^{r-1}).
  double c9() const { return 2.0 * c8(); }

  std::string describe() const;

private:
  LowerOrderCoeff(Kind kind, double r, double c) : kind_(kind), r_(r), c_(c) {}

  Kind kind_;
  double r_;
  double c_;
};

double d_eval(const LowerOrderCoeff& coeff, double s);
double g_eval(const LowerOrderCoeff& coeff, double s);

/// Whether r lies in the convergence range for d = 2:
///   Implicit:      r in (2, 2p]
///   SemiImplicit:  r in (2, p + 1] for p < 2, and r in (2, 3) for p = 2.
/// The Zero coefficient is admissible for every scheme.
bool admissibility(const LowerOrderCoeff& coeff, double p, SchemeKind scheme);

}  // namespace pflow

#endif  // PFLOW_LOWER_ORDER_HPP
