#include "pflow/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "pflow/errors.hpp"
#include "pflow/random.hpp"

namespace pflow {

namespace {

const std::map<std::string, std::set<std::string>>& allowed_params()
{
  static const std::map<std::string, std::set<std::string>> table{
      {"zero", {}},
      {"sin-product", {"amplitude", "kx", "ky"}},
      {"bump", {"amplitude", "cx", "cy", "radius"}},
      {"bilinear", {"amplitude"}},
      {"bubble", {"amplitude"}},
  };
  return table;
}

void check_params(const FieldSpec& spec, bool source)
{
  const auto it = allowed_params().find(spec.name);
  if (it == allowed_params().end()) throw DomainError("unknown field '" + spec.name + "'");
  for (const auto& [key, value] : spec.params) {
    if (!std::isfinite(value)) throw DomainError("field parameter '" + key + "' is not finite");
    if (source && key == "decay") continue;
    if (!it->second.count(key)) throw DomainError("field '" + spec.name + "' has no parameter '" + key + "'");
  }
}

}  // namespace

double FieldSpec::param(const std::string& key, double fallback) const
{
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

const std::vector<std::string>& field_names()
{
  static const std::vector<std::string> names{"zero", "sin-product", "bump", "bilinear", "bubble"};
  return names;
}

ScalarField make_field(const FieldSpec& spec)
{
  check_params(spec, false);
  constexpr double pi = std::numbers::pi;
  const double A = spec.param("amplitude", 1.0);
  if (spec.name == "zero") return [](double, double) { return 0.0; };
  if (spec.name == "sin-product") {
    const double kx = spec.param("kx", 1.0), ky = spec.param("ky", 1.0);
    return [A, kx, ky](double x, double y) { return A * std::sin(kx * pi * x) * std::sin(ky * pi * y); };
  }
  if (spec.name == "bump") {
    const double cx = spec.param("cx", 0.5), cy = spec.param("cy", 0.5), R = spec.param("radius", 0.4);
    if (!(R > 0.0)) throw DomainError("bump radius must be positive");
    return [A, cx, cy, R](double x, double y) {
      const double s = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (R * R);
      return s < 1.0 ? A * std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
    };
  }
  if (spec.name == "bilinear") return [A](double x, double y) { return A * x * y; };
  return [A](double x, double y) { return 16.0 * A * x * (1.0 - x) * y * (1.0 - y); };
}

SpaceTimeField make_source(const FieldSpec& spec)
{
  check_params(spec, true);
  if (spec.name == "zero") return nullptr;
  FieldSpec spatial = spec;
  spatial.params.erase("decay");
  const ScalarField f = make_field(spatial);
  const double decay = spec.param("decay", 0.0);
  return [f, decay](double x, double y, double t) { return std::exp(-decay * t) * f(x, y); };
}

FemFunction random_field(const MeshPtr& mesh, std::uint64_t seed, double amplitude)
{
  Rng rng(seed);
  Eigen::VectorXd coeffs(Eigen::Index(mesh->num_dofs()));
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) coeffs[i] = rng.uniform(-amplitude, amplitude);
  return FemFunction(mesh, std::move(coeffs));
}

}  // namespace pflow
