#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv)
{
  CLI::App app{"pflow: semi-implicit and implicit p-Laplace evolutions with stability diagnostics"};
  app.require_subcommand(1);
  bool single_thread = false;
  app.add_flag("--single-thread", single_thread, "Force sequential execution (execution is always sequential)");

  std::string config_path;
  std::string output;

  auto* run = app.add_subcommand("run", "Run one evolution and write trajectory.csv and diagnostics.json");
  run->add_option("config", config_path, "INI configuration file")->required();
  run->add_option("-o,--output", output, "Output directory (overrides [output] directory)");

  auto* study = app.add_subcommand("study", "Run a refinement study with its negative control");
  study->add_option("config", config_path, "INI configuration file")->required();
  study->add_option("-o,--output", output, "Output directory (overrides [output] directory)");

  std::uint64_t seed = 42;
  std::size_t samples = 1000000;
  auto* lemmas = app.add_subcommand("check-lemmas", "Randomized certification of the operator inequalities");
  lemmas->add_option("--seed", seed, "RNG seed")->capture_default_str();
  lemmas->add_option("--samples", samples, "Samples per inequality")->capture_default_str();
  lemmas->add_option("-o,--output", output, "JSON report file");

  int n = 8;
  int refinements = 0;
  auto* mesh = app.add_subcommand("export-mesh", "Write the unit-square mesh as legacy VTK");
  mesh->add_option("--n", n, "Subdivisions per side")->capture_default_str();
  mesh->add_option("--refinements", refinements, "Red refinements")->capture_default_str();
  mesh->add_option("-o,--output", output, "VTK file")->required();

  for (auto* sub : {run, study, lemmas, mesh})
    sub->add_flag("--single-thread", single_thread, "Force sequential execution (execution is always sequential)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help exits 0; usage errors share the generic failure code
    return app.exit(e) == 0 ? 0 : pflow::app::kFailure;
  }

  const std::optional<std::string> out = output.empty() ? std::nullopt : std::optional<std::string>(output);
  if (*run) return pflow::app::cmd_run(config_path, out, std::cout);
  if (*study) return pflow::app::cmd_study(config_path, out, std::cout);
  if (*lemmas) return pflow::app::cmd_check_lemmas(seed, samples, out, std::cout);
  return pflow::app::cmd_export_mesh(n, refinements, output, std::cout);
}
