#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "warpdirac/config.hpp"
#include "warpdirac/errors.hpp"

namespace warpdirac {

enum class Command { CheckMetric, Spectrum, Validate, Evolve, StrichartzScan };

std::string to_string(Command command);
Command parse_command(const std::string& name);

// Exit codes.
inline constexpr int kExitPass = 0;
inline constexpr int kExitContract = 2;
inline constexpr int kExitNonAdmissible = 3;
inline constexpr int kExitConfiguration = 4;
inline constexpr int kExitNumerical = 5;

int exit_code_for(ErrorKind kind);

struct RunOutcome {
  int exit_code = kExitPass;
  std::string message;
  // file name -> content, written only for exit codes 0, 2 and 3
  std::map<std::string, std::string> artifacts;
};

// Runs a workflow and returns its artifacts without touching the filesystem.
RunOutcome execute(const RunConfig& config, Command command);

// Runs a workflow and writes its artifacts atomically into config.output_dir.
// Nothing is written for configuration or numerical failures.
int run(const RunConfig& config, Command command, std::ostream& log);

}  // namespace warpdirac
