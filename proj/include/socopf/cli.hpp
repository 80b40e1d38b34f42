#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "socopf/matpower_io.hpp"

namespace socopf {

enum class Command { Solve, Sweep, Tighten, Validate };

struct RunConfig {
  std::filesystem::path case_path;
  Command command = Command::Solve;
  /// Solve and tighten use the first factor; sweep uses all of them.
  std::vector<double> load_factors{1.0};
  /// Overrides the primal, dual and gap tolerances of the solver.
  std::optional<double> tolerance;
  ReportFormat format = ReportFormat::Json;
  /// Empty: the report is only returned (and printed by the tool).
  std::filesystem::path out;
  bool include_recovery_cone = true;
  bool include_loss_ampacity = true;
  /// Standard-form dump of the (first) program, for external cross-checks.
  std::filesystem::path dump_program;
  /// Random tiny networks per topology for `validate`.
  int validate_samples = 8;

  /// Throws InvalidArgument on an empty factor list, negative factors or a
  /// nonpositive tolerance.
  void validate() const;
};

/// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitInputError = 3;

struct RunResult {
  int exit_code = kExitOk;
  /// Report text in the configured format; empty on error.
  std::string report;
  /// JSON error record {"error": {"code", "message"}}; empty on success.
  std::string error;
};

/// Parse, build, solve, recover, analyze and report. Never throws; failures
/// come back as an exit code plus an error record. The report is written
/// atomically to config.out when set.
RunResult run(const RunConfig& config);

/// Writes through a temporary file in the same directory and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Command-line front end (CLI11). Prints the report to stdout unless --out
/// is given and the error record to stderr; returns the exit code.
int cli_main(int argc, char** argv);

}  // namespace socopf
