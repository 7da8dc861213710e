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

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "vrhmc/experiment.hpp"

namespace vrhmc {
namespace {

struct GridPoint {
  double step_size;
  double friction;
};

struct ChainTask {
  std::size_t algorithm_slot;
  Algorithm algorithm;
  std::size_t grid_index;
  GridPoint grid;
  std::uint64_t seed;
};

std::vector<GridPoint> grid_for(const RunConfig& cfg, Algorithm algorithm) {
  std::vector<GridPoint> out;
  for (double h : cfg.step_sizes) {
    if (uses_momentum(algorithm)) {
      for (double d : cfg.frictions) out.push_back({h, d});
    } else {
      out.push_back({h, 0.0});
    }
  }
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::runtime_error(where + ": bad number '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s, const std::string& where) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::runtime_error(where + ": bad integer '" + s + "'");
  return v;
}

// Runs one chain and records metrics on both held-out parts.
MetricTrace run_one(const RunConfig& cfg, const PosteriorModel& train, const Dataset& ds,
                    const ChainTask& task, std::size_t epoch_length) {
  const std::size_t n = train.num_examples();
  const std::size_t b = std::min(cfg.batch_size, n);
  SamplerConfig sc;
  sc.algorithm = task.algorithm;
  sc.step_size = task.grid.step_size;
  sc.friction = uses_momentum(task.algorithm) ? task.grid.friction : 1.0;
  sc.batch_size = b;
  sc.epoch_length = epoch_length;
  sc.seed = task.seed;
  sc.stream = (static_cast<std::uint64_t>(task.algorithm) << 32) | task.grid_index;
  const EstimatorKind kind = traits(task.algorithm).estimator;
  if (kind == EstimatorKind::Svrg && cfg.svrg_batch_mode) sc.batch_mode = cfg.svrg_batch_mode;
  sc.steps = cfg.steps ? *cfg.steps : steps_for_passes(kind, cfg.passes, n, b, epoch_length);

  MetricTrace trace;
  trace.meta = {std::string(to_string(task.algorithm)), task.seed, task.grid.step_size, task.grid.friction, b,
                kind == EstimatorKind::Svrg ? epoch_length : 0};

  PredictiveEvaluator val(train, part_features(ds, SplitPart::Validation), part_targets(ds, SplitPart::Validation));
  PredictiveEvaluator test(train, part_features(ds, SplitPart::Test), part_targets(ds, SplitPart::Test));
  const auto on_step = [&](const StepView& v) {
    if (v.t % cfg.eval_every != 0 && v.t != sc.steps) return;
    if (v.t <= cfg.burn_in) return;
    val.add_sample(v.theta);
    test.add_sample(v.theta);
    for (const auto& m : val.metrics()) trace.add(v.t, v.passes, "val_" + m.name, m.value);
    for (const auto& m : test.metrics()) trace.add(v.t, v.passes, "test_" + m.name, m.value);
  };
  try {
    run_chain(train, sc, on_step);
  } catch (const DivergenceError& e) {
    trace.add(e.step(), 0.0, "diverged", static_cast<double>(e.step()));
  }
  return trace;
}

std::string format_optional(bool present, double v) { return present ? format_double(v) : std::string(); }

}  // namespace

bool SweepResult::ok() const {
  return std::none_of(summary.begin(), summary.end(), [](const SummaryRow& r) { return r.failed; });
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read trace file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw std::runtime_error(path.string() + ": missing trace header");
  }
  std::vector<TraceRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto f = split_csv_line(line);
    if (f.size() != 8) throw std::runtime_error(where + ": expected 8 fields");
    TraceRow r;
    r.algorithm = f[0];
    r.seed = parse_u64(f[1], where);
    r.step_size = parse_double(f[2], where);
    r.friction = parse_double(f[3], where);
    r.step = parse_u64(f[4], where);
    r.passes = parse_double(f[5], where);
    r.metric = f[6];
    r.value = parse_double(f[7], where);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<GridChoice> select_grid_points(const std::vector<TraceRow>& rows, const std::string& metric,
                                           bool larger_is_better) {
  struct Point {
    double h, d;
    bool diverged = false;
    std::vector<std::uint64_t> seeds;
    std::map<std::uint64_t, double> last;  // final metric value per seed
    std::map<std::uint64_t, std::size_t> last_step;
  };
  std::vector<std::string> algorithms;
  std::map<std::string, std::vector<Point>> points;
  for (const auto& r : rows) {
    if (!points.count(r.algorithm)) algorithms.push_back(r.algorithm);
    auto& list = points[r.algorithm];
    auto it = std::find_if(list.begin(), list.end(),
                           [&](const Point& p) { return p.h == r.step_size && p.d == r.friction; });
    if (it == list.end()) {
      Point p;
      p.h = r.step_size;
      p.d = r.friction;
      list.push_back(std::move(p));
      it = std::prev(list.end());
    }
    if (std::find(it->seeds.begin(), it->seeds.end(), r.seed) == it->seeds.end()) it->seeds.push_back(r.seed);
    if (r.metric == "diverged") it->diverged = true;
    if (r.metric == metric) {
      const auto ls = it->last_step.find(r.seed);
      if (ls == it->last_step.end() || r.step >= ls->second) {
        it->last_step[r.seed] = r.step;
        it->last[r.seed] = r.value;
      }
    }
  }
  std::vector<GridChoice> out;
  for (const auto& alg : algorithms) {
    GridChoice choice;
    choice.algorithm = alg;
    for (const auto& p : points[alg]) {
      if (p.diverged || p.last.size() != p.seeds.size()) continue;
      double sum = 0.0;
      for (std::uint64_t s : p.seeds) sum += p.last.at(s);
      const double score = sum / static_cast<double>(p.seeds.size());
      if (!std::isfinite(score)) continue;
      const bool better = !choice.found || (larger_is_better ? score > choice.score : score < choice.score);
      if (better) {
        choice.found = true;
        choice.step_size = p.h;
        choice.friction = p.d;
        choice.score = score;
      }
    }
    out.push_back(choice);
  }
  return out;
}

SweepResult run_sweep(const RunConfig& cfg) {
  validate_run_config(cfg);
  const Dataset ds = prepare_dataset(cfg);
  const auto train = make_model(cfg, ds, SplitPart::Train);
  const std::size_t n = train->num_examples();
  if (cfg.batch_size > n) {
    throw ConfigError("batch size b=" + std::to_string(cfg.batch_size) + " exceeds the training size " +
                      std::to_string(n));
  }
  const std::size_t epoch_length = cfg.epoch_length ? *cfg.epoch_length : default_epoch_length(n, cfg.batch_size);

  std::vector<ChainTask> tasks;
  for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
    const auto grid = grid_for(cfg, cfg.algorithms[a]);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      for (std::uint64_t seed : cfg.seeds) tasks.push_back({a, cfg.algorithms[a], g, grid[g], seed});
    }
  }
  // Fail fast on constraint violations instead of inside worker threads.
  for (const auto& t : tasks) {
    SamplerConfig sc;
    sc.algorithm = t.algorithm;
    sc.step_size = t.grid.step_size;
    sc.friction = uses_momentum(t.algorithm) ? t.grid.friction : 1.0;
    sc.steps = 1;
    sc.batch_size = cfg.batch_size;
    sc.epoch_length = epoch_length;
    if (traits(t.algorithm).estimator == EstimatorKind::Svrg && cfg.svrg_batch_mode) sc.batch_mode = cfg.svrg_batch_mode;
    validate_config(sc, n);
  }

  std::vector<MetricTrace> traces(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        traces[i] = run_one(cfg, *train, ds, tasks[i], epoch_length);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks.size();
      }
    }
  };
  {
    const std::size_t workers = std::min(cfg.threads, std::max<std::size_t>(tasks.size(), 1));
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  const auto& out_dir = cfg.output_dir;
  std::filesystem::create_directories(out_dir / "traces");
  std::vector<TraceRow> rows;
  for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
    const std::string name(to_string(cfg.algorithms[a]));
    std::ofstream file(out_dir / "traces" / (name + ".csv"), std::ios::binary);
    if (!file) throw std::runtime_error("cannot write trace file for " + name);
    file << kTraceHeader << '\n';
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].algorithm_slot != a) continue;
      write_trace_rows(file, traces[i]);
      for (const auto& r : traces[i].records) {
        rows.push_back({traces[i].meta.algorithm, traces[i].meta.seed, traces[i].meta.step_size,
                        traces[i].meta.friction, r.step, r.passes, r.metric, r.value});
      }
    }
  }

  const OutputKind kind = train->output_kind();
  const std::string primary = PredictiveEvaluator::primary_metric(kind);
  SweepResult result;
  result.val_metric = "val_" + primary;
  result.test_metric = "test_" + primary;
  const auto val_choice = select_grid_points(rows, result.val_metric, PredictiveEvaluator::larger_is_better(kind));

  for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
    SummaryRow s;
    s.algorithm = std::string(to_string(cfg.algorithms[a]));
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].algorithm_slot != a) continue;
      ++s.runs;
      const auto& rec = traces[i].records;
      if (!rec.empty() && rec.back().metric == "diverged") ++s.diverged;
    }
    const auto it = std::find_if(val_choice.begin(), val_choice.end(),
                                 [&](const GridChoice& c) { return c.algorithm == s.algorithm; });
    s.failed = it == val_choice.end() || !it->found;
    if (!s.failed) {
      s.step_size = it->step_size;
      s.friction = it->friction;
      s.val_metric = it->score;
      const auto test_choice = select_grid_points(
          [&] {
            std::vector<TraceRow> sel;
            for (const auto& r : rows) {
              if (r.algorithm == s.algorithm && r.step_size == s.step_size && r.friction == s.friction) sel.push_back(r);
            }
            return sel;
          }(),
          result.test_metric, PredictiveEvaluator::larger_is_better(kind));
      s.test_metric = test_choice.empty() ? NAN : test_choice.front().score;
    }
    result.summary.push_back(s);
  }

  {
    std::ofstream file(out_dir / "summary.csv", std::ios::binary);
    if (!file) throw std::runtime_error("cannot write summary.csv");
    file << kSummaryHeader << '\n';
    for (const auto& s : result.summary) {
      file << s.algorithm << ',' << format_optional(!s.failed, s.step_size) << ','
           << format_optional(!s.failed, s.friction) << ',' << format_optional(!s.failed, s.val_metric) << ','
           << format_optional(!s.failed, s.test_metric) << ',' << s.diverged << ','
           << (s.failed ? "failed" : "ok") << '\n';
    }
  }
  write_metadata(ds, out_dir / "dataset.json");
  if (std::any_of(result.summary.begin(), result.summary.end(), [](const SummaryRow& s) { return !s.failed; })) {
    emit_plot_data(out_dir, result.test_metric);
  }
  return result;
}

std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& output_dir,
                                                  const std::string& metric) {
  std::ifstream summary(output_dir / "summary.csv");
  if (!summary) throw std::runtime_error("cannot read " + (output_dir / "summary.csv").string());
  std::string line;
  if (!std::getline(summary, line) || line != kSummaryHeader) throw std::runtime_error("summary.csv: bad header");

  struct Selected {
    std::string algorithm;
    double h, d;
  };
  std::vector<Selected> selected;
  while (std::getline(summary, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 7) throw std::runtime_error("summary.csv: expected 7 fields");
    if (f[6] != "ok") continue;
    selected.push_back({f[0], parse_double(f[1], "summary.csv"), parse_double(f[2], "summary.csv")});
  }
  if (selected.empty()) throw std::runtime_error("no algorithm has a selected grid point");

  // Build every series before writing so errors leave no partial output.
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  for (const auto& sel : selected) {
    const auto rows = read_trace_csv(output_dir / "traces" / (sel.algorithm + ".csv"));
    std::map<std::size_t, std::pair<double, std::vector<double>>> by_step;
    for (const auto& r : rows) {
      if (r.algorithm != sel.algorithm || r.step_size != sel.h || r.friction != sel.d || r.metric != metric) continue;
      auto& slot = by_step[r.step];
      slot.first = r.passes;
      slot.second.push_back(r.value);
    }
    if (by_step.empty()) throw std::runtime_error("metric '" + metric + "' absent from traces of " + sel.algorithm);
    std::ostringstream body;
    for (const auto& [step, entry] : by_step) {
      double sum = 0.0;
      for (double v : entry.second) sum += v;
      body << format_double(entry.first) << ' ' << format_double(sum / static_cast<double>(entry.second.size()))
           << '\n';
    }
    files.emplace_back(output_dir / "plot" / (sel.algorithm + "." + metric + ".dat"), body.str());
  }
  std::filesystem::create_directories(output_dir / "plot");
  std::vector<std::filesystem::path> written;
  for (const auto& [path, body] : files) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
    written.push_back(path);
  }
  return written;
}

}  // namespace vrhmc
