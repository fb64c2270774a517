#ifndef PFLOW_APP_CONFIG_HPP
#define PFLOW_APP_CONFIG_HPP

#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>

#include "pflow/diagnostics.hpp"
#include "pflow/fields.hpp"
#include "pflow/schemes.hpp"

namespace pflow::app {

/// Parse or validation failure; the message names the file, line and field when known.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int n = 8;
  int refinements = 0;
  SchemeConfig scheme;
  FieldSpec initial{"sin-product", {}};
  FieldSpec source{"zero", {}};
  std::string output_directory = "pflow-out";
  int snapshots = 0;  // write u^k every `snapshots` steps; 0 disables
  std::uint64_t seed = 0;

  int study_levels = 4;
  StudyConfig::Coupling coupling = StudyConfig::Coupling::Default;
  bool negative_control = true;
  std::optional<double> alpha;

  /// The initial field is drawn from the seed when initial.name == "random".
  bool random_initial() const { return initial.name == "random"; }
};

/// INI text with sections [mesh] [model] [lower_order] [time] [scheme] [data]
/// [output] [run] [study].  Unknown sections or keys are errors.
RunConfig parse_config(std::istream& in, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

MeshPtr build_mesh(const RunConfig& config);
FemFunction build_initial(const RunConfig& config, const MeshPtr& mesh);
StudyConfig build_study(const RunConfig& config);

}  // namespace pflow::app

#endif  // PFLOW_APP_CONFIG_HPP
