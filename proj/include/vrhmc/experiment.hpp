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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vrhmc/data.hpp"
#include "vrhmc/metrics.hpp"
#include "vrhmc/model.hpp"
#include "vrhmc/sampler.hpp"

namespace vrhmc {

enum class ModelKind { Linear, Logistic, Bnn };

struct DatasetSpec {
  enum class Source { Csv, Synthetic };
  Source source = Source::Synthetic;
  std::filesystem::path path;
  CsvSchema schema;
  // synthetic_gaussian parameters
  std::size_t synthetic_n = 100;
  std::size_t synthetic_d = 5;
  double synthetic_sigma = 1.0;
  std::uint64_t synthetic_seed = 0;
  Vector synthetic_beta;
  std::uint64_t split_seed = 0;
  bool standardize = true;
};

/// Validated experiment description. See README for the file syntax.
struct RunConfig {
  DatasetSpec dataset;
  ModelKind model = ModelKind::Linear;
  double noise_sd = 1.0;
  BnnOptions bnn;
  std::vector<Algorithm> algorithms;
  std::vector<double> step_sizes;
  std::vector<double> frictions{1.0, 5.0, 10.0, 30.0};
  std::size_t batch_size = 10;
  std::optional<std::size_t> epoch_length;  // default floor(n_train / b)
  double passes = 10.0;
  std::optional<std::size_t> steps;         // overrides passes when set
  std::vector<std::uint64_t> seeds{1};
  std::filesystem::path output_dir = "out";
  std::size_t eval_every = 10;
  std::size_t burn_in = 0;
  std::size_t threads = 1;
  std::optional<BatchMode> svrg_batch_mode;
};

/// Log-spaced default step-size grid used by `h = default`.
std::vector<double> default_step_grid();

/// Parses `key = value` lines ('#' starts a comment). Unknown keys, missing
/// required keys and grid points violating the sampler constraints raise
/// ConfigError naming the key and line.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {},
                            const std::string& source_name = "<config>");

/// Checks cross-key constraints; called by the parsers.
void validate_run_config(const RunConfig& cfg);

/// Loads, splits and (optionally) standardizes the configured dataset.
Dataset prepare_dataset(const RunConfig& cfg);
std::unique_ptr<PosteriorModel> make_model(const RunConfig& cfg, const Dataset& dataset, SplitPart part);

/// One row of the trace CSV.
struct TraceRow {
  std::string algorithm;
  std::uint64_t seed = 0;
  double step_size = 0.0;
  double friction = 0.0;
  std::size_t step = 0;
  double passes = 0.0;
  std::string metric;
  double value = 0.0;
};

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

struct GridChoice {
  std::string algorithm;
  bool found = false;
  double step_size = 0.0;
  double friction = 0.0;
  double score = 0.0;  // seed-averaged final value of the selection metric
};

/// Picks, per algorithm, the grid point whose seed-averaged final value of
/// `metric` is best. Grid points with any diverged seed are skipped; ties go to
/// the first point in trace order. Pure function of the rows.
std::vector<GridChoice> select_grid_points(const std::vector<TraceRow>& rows, const std::string& metric,
                                           bool larger_is_better);

struct SummaryRow {
  std::string algorithm;
  bool failed = false;
  double step_size = 0.0;
  double friction = 0.0;
  double val_metric = 0.0;
  double test_metric = 0.0;
  std::size_t diverged = 0;
  std::size_t runs = 0;
};

struct SweepResult {
  std::vector<SummaryRow> summary;
  std::string val_metric;
  std::string test_metric;
  bool ok() const;
};

/// Runs every (algorithm, h, D, seed) chain, selects on the validation split
/// and writes traces/<ALG>.csv, summary.csv, dataset.json and plot series
/// under cfg.output_dir. Output is independent of cfg.threads.
SweepResult run_sweep(const RunConfig& cfg);

inline constexpr const char* kSummaryHeader =
    "algorithm,selected_h,selected_D,final_val_metric,final_test_metric,diverged_count,status";

/// Writes plot/<ALG>.<metric>.dat with "passes value" lines for each
/// algorithm's selected grid point, averaged over seeds at each step. Returns
/// the files written. Throws if nothing is selected or the metric is absent.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& output_dir,
                                                  const std::string& metric);

}  // namespace vrhmc
