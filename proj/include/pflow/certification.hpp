#ifndef PFLOW_CERTIFICATION_HPP
#define PFLOW_CERTIFICATION_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace pflow {

/// Parameter ranges swept by the randomized lemma certification.
struct CertificationGrid {
  std::vector<double> exponents{1.2, 1.5, 1.8, 2.0};
  std::vector<double> deltas{0.0, 0.1};
  double eps_min = 1e-6;
  double eps_max = 1.0;
  double radius = 10.0;  // |a|, |b| uniform in [0, radius]
};

/// One line of the certification table.
///
/// Inequality rows count violations of an exact inequality.  Measured rows
/// record the observed range [min_value, max_value] of a ratio whose
/// constant is only known to exist; they count a violation only for a
/// non-finite or non-positive sample.
struct CertificationRow {
  std::string name;
  bool measured = false;
  std::size_t samples = 0;
  std::size_t violations = 0;
  double min_value = 0.0;
  double max_value = 0.0;
};

struct CertificationReport {
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::vector<CertificationRow> rows;

  std::size_t total_violations() const;
  bool passed() const { return total_violations() == 0; }
  const CertificationRow& row(const std::string& name) const;
};

/// Samples every operator inequality `samples` times with (p, delta) drawn from the grid,
/// eps log-uniform in [eps_min, eps_max].  Deterministic for a given seed.
CertificationReport certify_lemmas(std::uint64_t seed, std::size_t samples,
                                   const CertificationGrid& grid = {});

/// Empirical supremum of |S_eps(a) - S_eps(b)| / (|a - b| (eps^2 + |a|^2 + |b|^2)^{(p-2)/2}).
double measure_regularized_lipschitz(double p, std::size_t samples, std::uint64_t seed);

/// measure_regularized_lipschitz with a fixed seed and sample count, cached per p.
double regularized_lipschitz_constant(double p);

}  // namespace pflow

#endif  // PFLOW_CERTIFICATION_HPP
