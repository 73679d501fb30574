// Scenario runner: brittle-lab {solve|evolve|measures|verify} --config PATH [--out DIR] [--threads N] [--seed N]

#include <iostream>

#include <CLI11.hpp>

#include "brittle/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Quasistatic brittle fracture lab"};
  app.require_subcommand(1);
  brittle::RunOptions options;
  std::string config;
  for (const char* name : {"solve", "evolve", "measures", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "scenario config (JSON)")->required();
    sub->add_option("--out", options.out_dir, "output directory (overrides the config)");
    sub->add_option("--threads", options.threads, "worker cap, 0 = hardware concurrency");
    sub->add_option("--seed", options.seed, "seed for randomized property batteries");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  return brittle::run_command(command, config, options, std::cerr);
}
