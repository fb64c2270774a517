#ifndef PFLOW_RANDOM_HPP
#define PFLOW_RANDOM_HPP

#include <cstdint>
#include <cmath>
#include <random>

namespace pflow {

/// Seedable generator with a platform-independent stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard.  Doubles are formed from the top 53 bits, (x >> 11) * 2^-53,
/// instead of std::uniform_real_distribution, whose algorithm is
/// implementation defined.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// log-uniform in [lo, hi], lo > 0.
  double log_uniform(double lo, double hi);

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) { return std::size_t(uniform() * double(n)) % n; }

private:
  std::mt19937_64 engine_;
};

inline double Rng::log_uniform(double lo, double hi)
{
  const double a = std::log(lo);
  const double b = std::log(hi);
  return std::exp(uniform(a, b));
}

}  // namespace pflow

#endif  // PFLOW_RANDOM_HPP
