// Copyright 2026 The pathint Authors
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

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli.hpp"

namespace {

using namespace pathint;

void add_common(CLI::App* cmd, std::string& config_path, cli::Overrides& o) {
  cmd->add_option("--config", config_path, "JSON experiment configuration");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--paths", o.paths, "paths per ensemble")->check(CLI::PositiveNumber);
  cmd->add_option("--dt", o.dt, "time step; rounded to divide the horizon")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--threads", o.threads, "simulation workers (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pathint: path integral control experiments"};
  app.require_subcommand(1);

  std::string config_path;
  cli::Overrides overrides;
  std::string which;

  auto* sim = app.add_subcommand("simulate", "simulate a policy and summarize costs and weights");
  add_common(sim, config_path, overrides);
  auto* fit = app.add_subcommand("fit", "fit a feedback controller by iterative importance sampling");
  add_common(fit, config_path, overrides);
  auto* bench = app.add_subcommand("bench", "reproduce the GBM benchmark");
  add_common(bench, config_path, overrides);
  bench->add_option("which", which, "table1, figure1 or figure2")
      ->required()
      ->check(CLI::IsMember({"table1", "figure1", "figure2"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitConfig;
  }

  try {
    cli::ExperimentConfig config;
    if (!config_path.empty()) {
      config = cli::load_config(config_path);
    }
    cli::apply(overrides, config);
    if (sim->parsed()) {
      std::cout << cli::cmd_simulate(config).dump(2) << '\n';
    } else if (fit->parsed()) {
      std::cout << cli::cmd_fit(config).dump(2) << '\n';
    } else {
      for (const auto& path : cli::cmd_bench(which, config)) {
        std::cout << path << '\n';
      }
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return cli::kExitNumerical;
  } catch (const InvalidArgument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return cli::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitConfig;
  }
  return cli::kExitOk;
}
