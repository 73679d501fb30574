#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "brittle/scenario.hpp"

namespace brittle {

struct RunOptions {
  std::string out_dir;  ///< empty: use the scenario's output directory
  int threads = 0;
  std::uint64_t seed = 1;
};

struct CommandResult {
  nlohmann::ordered_json results;
  bool passed = true;
};

/// Each command writes its CSV files into `out_dir` and returns the
/// structured results that go into report.json.
CommandResult cmd_solve(const Scenario& s, const std::string& out_dir, const RunOptions& options);
CommandResult cmd_evolve(const Scenario& s, const std::string& out_dir, const RunOptions& options);
CommandResult cmd_measures(const Scenario& s, const std::string& out_dir, const RunOptions& options);
CommandResult cmd_verify(const Scenario& s, const std::string& out_dir, const RunOptions& options);

/// Loads the config, runs the command and writes report.json. Returns the
/// exit code: 0 all verdicts pass, 1 a verification failed, 2 config or
/// runtime error (message written to `err`).
int run_command(const std::string& command, const std::string& config_path, const RunOptions& options,
                std::ostream& err);

}  // namespace brittle
