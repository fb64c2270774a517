#ifndef PFLOW_APP_COMMANDS_HPP
#define PFLOW_APP_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace pflow::app {

/// Exit codes shared by all subcommands.
enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,    // config error, precondition failure, solver failure
  kViolation = 2,  // ledger, bound or study assertion violated
};

/// Writes trajectory.csv, diagnostics.json and optional snapshots into the
/// output directory (overridden by `output_dir` when given).
int cmd_run(const std::string& config_path, const std::optional<std::string>& output_dir, std::ostream& log);

/// Writes study.json and study.csv.
int cmd_study(const std::string& config_path, const std::optional<std::string>& output_dir, std::ostream& log);

/// Prints the certification table; writes JSON to `output_file` when given.
int cmd_check_lemmas(std::uint64_t seed, std::size_t samples, const std::optional<std::string>& output_file,
                     std::ostream& log);

/// Writes the (refined) unit-square mesh as legacy VTK.
int cmd_export_mesh(int n, int refinements, const std::string& output_file, std::ostream& log);

}  // namespace pflow::app

#endif  // PFLOW_APP_COMMANDS_HPP
