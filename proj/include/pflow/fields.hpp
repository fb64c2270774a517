#ifndef PFLOW_FIELDS_HPP
#define PFLOW_FIELDS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pflow/assembly.hpp"
#include "pflow/mesh.hpp"

namespace pflow {

/// Named analytic fields with parameters, used for initial data and sources.
///
///   zero                            0
///   sin-product  amplitude kx ky    A sin(kx pi x) sin(ky pi y)
///   bump         amplitude cx cy radius
///                                   A exp(1 - 1 / (1 - r^2 / R^2)) for r < R, else 0
///   bilinear     amplitude          A x y
///   bubble       amplitude          16 A x (1 - x) y (1 - y)
///
/// Missing parameters take the defaults A = 1, kx = ky = 1, (cx, cy) = (0.5, 0.5),
/// R = 0.4.  Sources additionally accept `decay`, multiplying by exp(-decay t).
struct FieldSpec {
  std::string name = "zero";
  std::map<std::string, double> params;

  double param(const std::string& key, double fallback) const;
};

/// Throws DomainError for an unknown name or parameter.
ScalarField make_field(const FieldSpec& spec);
SpaceTimeField make_source(const FieldSpec& spec);

const std::vector<std::string>& field_names();

/// Interior nodal values uniform in [-amplitude, amplitude].
FemFunction random_field(const MeshPtr& mesh, std::uint64_t seed, double amplitude = 1.0);

}  // namespace pflow

#endif  // PFLOW_FIELDS_HPP
