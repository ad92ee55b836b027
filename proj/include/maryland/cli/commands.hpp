#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "maryland/cli/config.hpp"
#include "maryland/errors.hpp"

namespace maryland::cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 2, kConvergenceFailure = 3, kInvariantViolation = 4 };

/// Raised by `report` on an empty run directory.
class MissingArtifacts : public Error {
 public:
  explicit MissingArtifacts(const std::string& dir) : Error("no artifacts found in " + dir) {}
};

/// Raised by `report` when an artifact cannot be parsed; names the file.
class CorruptArtifact : public Error {
 public:
  CorruptArtifact(const std::string& file, const std::string& why) : Error(file + ": " + why), file(file) {}
  std::string file;
};

struct CommandResult {
  int exit_code = kSuccess;
  std::vector<std::string> artifacts;  // file names inside the output directory
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
};

CommandResult cmd_spectrum(const ExperimentConfig& c, const std::string& dir);
CommandResult cmd_separation(const ExperimentConfig& c, const std::string& dir);
CommandResult cmd_solve(const ExperimentConfig& c, const std::string& dir);
CommandResult cmd_ldt(const ExperimentConfig& c, const std::string& dir);
CommandResult cmd_report(const std::string& dir);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
};

/// Load the config, apply overrides, run the verb and map every failure to an exit code.
/// Failures are also written as `failure_<verb>.json` when an output directory is known.
int run_command(const std::string& verb, const std::string& config_path, const Overrides& o, std::ostream& log);

}  // namespace maryland::cli
