#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace pinlab::app {

struct RunOptions {
  std::filesystem::path out;  // overrides output.directory when non-empty
  int threads = 1;
  bool corrupt_k = false;  // oracle-check detector self-test
};

struct CommandResult {
  int exit_code = 0;  // 0 pass, 2 acceptance failure
  std::vector<std::filesystem::path> files;
};

const std::vector<std::string>& command_names();

/// Runs one subcommand. Throws ConfigError for config problems.
CommandResult run_command(const std::string& name, const ExperimentConfig& cfg, const RunOptions& ro, std::ostream& log);

}  // namespace pinlab::app
