// Copyright 2026 The semigrav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>

#include <iostream>

#include "semigrav_cli/scenario.hpp"

int main(int argc, char** argv) {
  using namespace semigrav::cli;

  CLI::App app{"Newtonian semi-classical gravity laboratory"};
  app.set_version_flag("--version", SEMIGRAV_VERSION);
  RunOptions options;
  std::uint64_t seed = 0;
  auto* config = app.add_option("--config", options.config,
                                "Scenario file (JSON)")
                     ->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed,
                                  "Master seed; overrides the scenario's seed");
  app.add_option("--out", options.out_dir, "Output directory")
      ->capture_default_str();
  app.add_option("--threads", options.threads, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_flag("--quiet", options.quiet, "Suppress progress output");
  auto* constants = app.add_subcommand(
      "constants", "Print the SI constants table with sources");
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (constants->parsed()) {
    print_constants(std::cout);
    return kOk;
  }
  if (config->count() == 0) {
    std::cerr << "--config is required (or use the constants subcommand)\n";
    return kConfigError;
  }
  if (seed_opt->count() > 0) options.seed = seed;

  const RunResult result = run(options, std::cerr);
  if (!result.message.empty()) std::cerr << result.message << "\n";
  return result.exit_code;
}
