// Copyright 2026 The vrhmc Authors
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

// Command-line front end: `vrhmc run <config>` and `vrhmc plot <out-dir>`.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "vrhmc/experiment.hpp"

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(item, &used);
    if (used != item.size()) throw vrhmc::ConfigError("bad seed '" + item + "'");
    seeds.push_back(v);
  }
  if (seeds.empty()) throw vrhmc::ConfigError("--seeds needs at least one value");
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variance-reduced stochastic-gradient HMC benchmark runner"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a sweep described by a config file");
  std::string config_path;
  std::string out_dir;
  std::string seeds;
  double passes = 0.0;
  std::size_t threads = 0;
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seeds", seeds, "Comma-separated seeds");
  run->add_option("--passes", passes, "Pass budget per chain")->check(CLI::PositiveNumber);
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* plot = app.add_subcommand("plot", "Write plot series for the selected grid points");
  std::string plot_dir;
  std::string metric;
  plot->add_option("out-dir", plot_dir, "Sweep output directory")->required()->check(CLI::ExistingDirectory);
  plot->add_option("--metric", metric, "Trace metric, e.g. test_loglik")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      vrhmc::RunConfig cfg = vrhmc::parse_config(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (!seeds.empty()) cfg.seeds = parse_seed_list(seeds);
      if (run->count("--passes")) {
        cfg.passes = passes;
        cfg.steps.reset();
      }
      if (run->count("--threads")) cfg.threads = threads;
      const vrhmc::SweepResult result = vrhmc::run_sweep(cfg);
      for (const auto& s : result.summary) {
        std::cout << s.algorithm << ": ";
        if (s.failed) {
          std::cout << "failed (" << s.diverged << '/' << s.runs << " runs diverged)\n";
        } else {
          std::cout << "h=" << vrhmc::format_double(s.step_size) << " D=" << vrhmc::format_double(s.friction) << ' '
                    << result.test_metric << '=' << vrhmc::format_double(s.test_metric) << '\n';
        }
      }
      return result.ok() ? 0 : 3;
    }
    for (const auto& path : vrhmc::emit_plot_data(plot_dir, metric)) std::cout << path.string() << '\n';
    return 0;
  } catch (const vrhmc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
