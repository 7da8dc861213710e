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

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "vrhmc/experiment.hpp"

namespace vrhmc {
namespace {

struct Entry {
  std::string value;
  std::size_t line;
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "dataset",        "dataset.path",  "dataset.target", "dataset.header", "dataset.num_classes",
      "task",           "synthetic.n",   "synthetic.d",    "synthetic.sigma", "synthetic.seed",
      "synthetic.beta", "split.seed",    "standardize",    "model",          "model.noise_sd",
      "bnn.hidden",     "bnn.prior_sd",  "bnn.likelihood_sd", "algorithms",  "h",
      "D",              "b",             "K",              "passes",         "steps",
      "seeds",          "out",           "eval_every",     "burn_in",        "threads",
      "svrg.batch_mode",
  };
  return keys;
}

class Reader {
 public:
  Reader(std::map<std::string, Entry> entries, std::string source)
      : entries_(std::move(entries)), source_(std::move(source)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  const Entry& require(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(source_ + ": missing required key '" + key + "'");
    return it->second;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const auto it = entries_.find(key);
    const std::string where = it == entries_.end() ? source_ : source_ + ":" + std::to_string(it->second.line);
    throw ConfigError(where + ": key '" + key + "': " + what);
  }

  std::string text(const std::string& key) const { return require(key).value; }

  double real(const std::string& key) const { return parse_real(key, text(key)); }

  std::size_t count(const std::string& key) const { return parse_count(key, text(key)); }

  bool boolean(const std::string& key) const {
    const std::string v = text(key);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    fail(key, "expected true/false, got '" + v + "'");
  }

  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) fail(key, "empty list element");
      out.push_back(item);
    }
    if (out.empty()) fail(key, "list must not be empty");
    return out;
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : list(key)) out.push_back(parse_real(key, item));
    return out;
  }

  double parse_real(const std::string& key, const std::string& v) const {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x)) fail(key, "expected a number, got '" + v + "'");
    return x;
  }

  std::size_t parse_count(const std::string& key, const std::string& v) const {
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size()) fail(key, "expected a non-negative integer, got '" + v + "'");
    return static_cast<std::size_t>(x);
  }

  std::size_t line(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  const std::string& source() const { return source_; }

 private:
  std::map<std::string, Entry> entries_;
  std::string source_;
};

}  // namespace

std::vector<double> default_step_grid() { return {1e-5, 1e-4, 1e-3, 1e-2}; }

void validate_run_config(const RunConfig& cfg) {
  if (cfg.algorithms.empty()) throw ConfigError("at least one algorithm is required");
  if (cfg.step_sizes.empty()) throw ConfigError("step-size grid 'h' must not be empty");
  if (cfg.frictions.empty()) throw ConfigError("friction grid 'D' must not be empty");
  if (cfg.seeds.empty()) throw ConfigError("seed list must not be empty");
  if (cfg.batch_size < 1) throw ConfigError("batch size b must be >= 1");
  if (cfg.epoch_length && *cfg.epoch_length < 1) throw ConfigError("epoch length K must be >= 1");
  if (cfg.eval_every < 1) throw ConfigError("eval_every must be >= 1");
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
  if (!cfg.steps && !(cfg.passes > 0.0)) throw ConfigError("pass budget must be > 0");
  if (cfg.steps && *cfg.steps < 1) throw ConfigError("steps must be >= 1");
  for (double h : cfg.step_sizes) {
    if (!(h > 0.0)) throw ConfigError("step sizes must be > 0 (got " + format_double(h) + ")");
  }
  bool any_momentum = false;
  for (Algorithm a : cfg.algorithms) any_momentum = any_momentum || uses_momentum(a);
  if (any_momentum) {
    for (double h : cfg.step_sizes) {
      for (double d : cfg.frictions) {
        if (!(d >= 1.0) || !(d * h < 1.0)) {
          throw ConfigError("grid point (h=" + format_double(h) + ", D=" + format_double(d) +
                            ") violates the momentum sampler constraint Dh < 1, D >= 1");
        }
      }
    }
  }
  if (cfg.model == ModelKind::Bnn) {
    if (!(cfg.bnn.prior_sd > 0.0)) throw ConfigError("bnn.prior_sd must be > 0");
    if (cfg.bnn.likelihood == BnnLikelihood::Gaussian && !(cfg.bnn.likelihood_sd > 0.0)) {
      throw ConfigError("bnn.likelihood_sd must be > 0 for regression");
    }
  }
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir,
                            const std::string& source_name) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source_name + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": key '" + key + "': empty value");
    if (entries.count(key)) throw ConfigError(where + ": key '" + key + "' given twice");
    entries[key] = {value, line_no};
  }
  const Reader r(std::move(entries), source_name);

  RunConfig cfg;
  DatasetSpec& ds = cfg.dataset;
  const std::string source = r.text("dataset");
  Task task = Task::Regression;
  if (r.has("task")) {
    try {
      task = parse_task(r.text("task"));
    } catch (const DataError& e) {
      r.fail("task", e.what());
    }
  }
  if (source == "csv") {
    ds.source = DatasetSpec::Source::Csv;
    ds.path = r.text("dataset.path");
    if (ds.path.is_relative() && !base_dir.empty()) ds.path = base_dir / ds.path;
    const std::string target = r.text("dataset.target");
    const bool numeric = !target.empty() && target.find_first_not_of("0123456789") == std::string::npos;
    if (numeric) {
      ds.schema.target_column = r.parse_count("dataset.target", target);
    } else {
      ds.schema.target_column = target;
    }
    ds.schema.has_header = r.has("dataset.header") ? r.boolean("dataset.header") : true;
    if (r.has("dataset.num_classes")) ds.schema.num_classes = r.count("dataset.num_classes");
    if (!r.has("task")) r.fail("task", "required for csv datasets");
    ds.schema.task = task;
  } else if (source == "synthetic") {
    ds.source = DatasetSpec::Source::Synthetic;
    if (task != Task::Regression) r.fail("task", "synthetic datasets are regression only");
    if (r.has("synthetic.n")) ds.synthetic_n = r.count("synthetic.n");
    if (r.has("synthetic.d")) ds.synthetic_d = r.count("synthetic.d");
    if (r.has("synthetic.sigma")) ds.synthetic_sigma = r.real("synthetic.sigma");
    if (r.has("synthetic.seed")) ds.synthetic_seed = r.count("synthetic.seed");
    if (r.has("synthetic.beta")) {
      ds.synthetic_beta = r.reals("synthetic.beta");
      if (ds.synthetic_beta.size() != ds.synthetic_d) r.fail("synthetic.beta", "length must equal synthetic.d");
    }
    if (ds.synthetic_n < 3 || ds.synthetic_d < 1) r.fail("synthetic.n", "need n >= 3 and d >= 1");
  } else {
    r.fail("dataset", "expected 'csv' or 'synthetic', got '" + source + "'");
  }
  if (r.has("split.seed")) ds.split_seed = r.count("split.seed");
  if (r.has("standardize")) ds.standardize = r.boolean("standardize");

  const std::string model = r.has("model") ? r.text("model") : (task == Task::Regression ? "linear" : "logistic");
  if (model == "linear") {
    cfg.model = ModelKind::Linear;
    if (task != Task::Regression) r.fail("model", "linear regression needs task = regression");
  } else if (model == "logistic") {
    cfg.model = ModelKind::Logistic;
    if (task != Task::Binary) r.fail("model", "logistic regression needs task = binary");
  } else if (model == "bnn") {
    cfg.model = ModelKind::Bnn;
    cfg.bnn.likelihood = task == Task::Regression ? BnnLikelihood::Gaussian
                         : task == Task::Binary   ? BnnLikelihood::BernoulliLogit
                                                  : BnnLikelihood::CategoricalSoftmax;
    if (r.has("bnn.hidden")) cfg.bnn.hidden_units = r.count("bnn.hidden");
    cfg.bnn.prior_sd = r.real("bnn.prior_sd");
    if (task == Task::Regression) cfg.bnn.likelihood_sd = r.real("bnn.likelihood_sd");
  } else {
    r.fail("model", "expected linear, logistic or bnn, got '" + model + "'");
  }
  if (r.has("model.noise_sd")) {
    cfg.noise_sd = r.real("model.noise_sd");
    if (!(cfg.noise_sd > 0.0)) r.fail("model.noise_sd", "must be > 0");
  }

  for (const auto& name : r.list("algorithms")) {
    try {
      cfg.algorithms.push_back(parse_algorithm(name));
    } catch (const ConfigError& e) {
      r.fail("algorithms", e.what());
    }
  }
  cfg.step_sizes = r.text("h") == "default" ? default_step_grid() : r.reals("h");
  if (r.has("D")) cfg.frictions = r.reals("D");
  if (r.has("b")) cfg.batch_size = r.count("b");
  if (r.has("K") && r.text("K") != "auto") cfg.epoch_length = r.count("K");
  if (r.has("passes")) cfg.passes = r.real("passes");
  if (r.has("steps")) cfg.steps = r.count("steps");
  if (r.has("seeds")) {
    cfg.seeds.clear();
    for (const auto& s : r.list("seeds")) cfg.seeds.push_back(r.parse_count("seeds", s));
  }
  if (r.has("out")) {
    cfg.output_dir = r.text("out");
    if (cfg.output_dir.is_relative() && !base_dir.empty()) cfg.output_dir = base_dir / cfg.output_dir;
  }
  if (r.has("eval_every")) cfg.eval_every = r.count("eval_every");
  if (r.has("burn_in")) cfg.burn_in = r.count("burn_in");
  if (r.has("threads")) cfg.threads = r.count("threads");
  if (r.has("svrg.batch_mode")) {
    try {
      cfg.svrg_batch_mode = parse_batch_mode(r.text("svrg.batch_mode"));
    } catch (const std::invalid_argument& e) {
      r.fail("svrg.batch_mode", e.what());
    }
  }

  try {
    validate_run_config(cfg);
  } catch (const ConfigError& e) {
    std::string where = r.source();
    if (r.line("h")) where += ":" + std::to_string(r.line("h"));
    throw ConfigError(where + ": " + e.what());
  }
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.parent_path(), path.string());
}

Dataset prepare_dataset(const RunConfig& cfg) {
  const DatasetSpec& spec = cfg.dataset;
  Dataset ds;
  if (spec.source == DatasetSpec::Source::Csv) {
    ds = load_csv(spec.path, spec.schema);
  } else {
    ds = synthetic_gaussian(spec.synthetic_n, spec.synthetic_d, spec.synthetic_seed, spec.synthetic_beta,
                            spec.synthetic_sigma);
  }
  ds.metadata["split_seed"] = std::to_string(spec.split_seed);
  ds = split(std::move(ds), spec.split_seed);
  if (spec.standardize) ds = standardize(std::move(ds));
  return ds;
}

std::unique_ptr<PosteriorModel> make_model(const RunConfig& cfg, const Dataset& dataset, SplitPart part) {
  Matrix x = part_features(dataset, part);
  Vector y = part_targets(dataset, part);
  switch (cfg.model) {
    case ModelKind::Linear:
      if (dataset.task != Task::Regression) throw ConfigError("linear regression needs a regression dataset");
      return std::make_unique<LinearRegressionModel>(std::move(x), std::move(y), cfg.noise_sd);
    case ModelKind::Logistic:
      if (dataset.task != Task::Binary) throw ConfigError("logistic regression needs a binary dataset");
      return std::make_unique<LogisticRegressionModel>(std::move(x), std::move(y));
    case ModelKind::Bnn: {
      BnnOptions options = cfg.bnn;
      if (dataset.task == Task::Multiclass) options.num_classes = dataset.num_classes;
      return std::make_unique<BnnModel>(std::move(x), std::move(y), options);
    }
  }
  throw ConfigError("unknown model kind");
}

}  // namespace vrhmc
