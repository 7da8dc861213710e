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

#include "vrhmc/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vrhmc/random.hpp"

namespace vrhmc {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                                      : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw DataError(path.string() + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::string to_string(Task task) {
  switch (task) {
    case Task::Regression: return "regression";
    case Task::Binary: return "binary";
    case Task::Multiclass: return "multiclass";
  }
  return "unknown";
}

Task parse_task(const std::string& text) {
  if (text == "regression") return Task::Regression;
  if (text == "binary") return Task::Binary;
  if (text == "multiclass") return Task::Multiclass;
  throw DataError("unknown task '" + text + "' (expected regression, binary or multiclass)");
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  Dataset ds;
  ds.name = path.stem().string();
  ds.task = schema.task;

  std::string line;
  std::size_t line_no = 0;
  std::size_t arity = 0;
  std::size_t target = 0;
  std::vector<std::string> header;
  bool have_target = false;

  if (schema.has_header) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw DataError(path.string() + ": file is empty");
    header = split_fields(line);
    arity = header.size();
  }
  auto resolve_target = [&](std::size_t line_for_error) {
    if (const auto* name = std::get_if<std::string>(&schema.target_column)) {
      if (header.empty()) fail(path, line_for_error, "target column '" + *name + "' needs a header row");
      const auto it = std::find(header.begin(), header.end(), *name);
      if (it == header.end()) fail(path, line_for_error, "no column named '" + *name + "'");
      target = static_cast<std::size_t>(it - header.begin());
    } else {
      target = std::get<std::size_t>(schema.target_column);
      if (target >= arity) {
        fail(path, line_for_error, "target column index " + std::to_string(target) + " out of range");
      }
    }
    have_target = true;
  };
  if (schema.has_header) resolve_target(line_no);

  std::vector<double> values;
  std::vector<std::string> raw_labels;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (arity == 0) arity = fields.size();
    if (fields.size() != arity) {
      fail(path, line_no, "expected " + std::to_string(arity) + " fields, found " + std::to_string(fields.size()));
    }
    if (!have_target) resolve_target(line_no);
    if (arity < 2) fail(path, line_no, "need at least one feature column besides the target");
    for (std::size_t c = 0; c < arity; ++c) {
      if (c == target) continue;
      const auto v = parse_number(fields[c]);
      if (!v) fail(path, line_no, "unparseable value '" + fields[c] + "' in column " + std::to_string(c));
      values.push_back(*v);
    }
    const std::string& label = fields[target];
    switch (schema.task) {
      case Task::Regression: {
        const auto v = parse_number(label);
        if (!v) fail(path, line_no, "unparseable target '" + label + "'");
        ds.targets.push_back(*v);
        break;
      }
      case Task::Binary: {
        const auto v = parse_number(label);
        if (!v || (*v != 0.0 && *v != 1.0)) fail(path, line_no, "binary label must be 0 or 1, got '" + label + "'");
        ds.targets.push_back(*v);
        break;
      }
      case Task::Multiclass: {
        if (schema.num_classes) {
          const auto v = parse_number(label);
          if (!v || *v != std::floor(*v) || *v < 0.0 || *v >= static_cast<double>(*schema.num_classes)) {
            fail(path, line_no, "unknown class label '" + label + "' (expected 0.." +
                                    std::to_string(*schema.num_classes - 1) + ")");
          }
          ds.targets.push_back(*v);
        } else {
          if (label.empty()) fail(path, line_no, "missing class label");
          raw_labels.push_back(label);
        }
        break;
      }
    }
    ++rows;
  }
  if (rows == 0) throw DataError(path.string() + ": no data rows");

  ds.features = Matrix(rows, arity - 1, std::move(values));
  for (std::size_t c = 0; c < arity; ++c) {
    const std::string name = header.empty() ? "x" + std::to_string(c) : header[c];
    if (c == target) {
      ds.target_name = name;
    } else {
      ds.feature_names.push_back(name);
    }
  }

  if (schema.task == Task::Binary) ds.num_classes = 2;
  if (schema.task == Task::Multiclass) {
    if (schema.num_classes) {
      ds.num_classes = *schema.num_classes;
    } else {
      // Integer labels sort numerically, anything else lexicographically.
      std::vector<std::string> distinct(raw_labels.begin(), raw_labels.end());
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      const bool numeric = std::all_of(distinct.begin(), distinct.end(),
                                       [](const std::string& s) { return parse_number(s).has_value(); });
      if (numeric) {
        std::sort(distinct.begin(), distinct.end(), [](const std::string& a, const std::string& b) {
          return *parse_number(a) < *parse_number(b);
        });
      }
      std::map<std::string, std::size_t> ids;
      for (std::size_t k = 0; k < distinct.size(); ++k) ids[distinct[k]] = k;
      for (const auto& l : raw_labels) ds.targets.push_back(static_cast<double>(ids.at(l)));
      ds.num_classes = distinct.size();
      ds.class_labels = distinct;
    }
  }
  ds.metadata["source"] = path.string();
  return ds;
}

void write_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  const std::size_t d = dataset.num_features();
  for (std::size_t c = 0; c < d; ++c) {
    out << (c < dataset.feature_names.size() ? dataset.feature_names[c] : "x" + std::to_string(c)) << ',';
  }
  out << (dataset.target_name.empty() ? "y" : dataset.target_name) << '\n';
  char buf[64];
  auto put = [&](double v) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, ptr - buf);
  };
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      put(dataset.features(i, c));
      out << ',';
    }
    put(dataset.targets[i]);
    out << '\n';
  }
}

Dataset split(Dataset dataset, double train_ratio, double validation_ratio, double test_ratio,
              std::uint64_t seed) {
  if (std::abs(train_ratio + validation_ratio + test_ratio - 1.0) > 1e-9 || train_ratio < 0 ||
      validation_ratio < 0 || test_ratio < 0) {
    throw DataError("split ratios must be non-negative and sum to 1");
  }
  const std::size_t n = dataset.size();
  if (n < 3) throw DataError("need at least 3 rows to split, have " + std::to_string(n));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RandomStream rng(seed, 0x5350'4c49'54ULL);  // "SPLIT"
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_index(i + 1));
    std::swap(order[i], order[j]);
  }
  const auto n_train = static_cast<std::size_t>(std::floor(train_ratio * static_cast<double>(n) + 1e-9));
  const auto n_val = static_cast<std::size_t>(std::floor(validation_ratio * static_cast<double>(n) + 1e-9));
  Split s;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.validation.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  s.test.assign(order.begin() + n_train + n_val, order.end());
  dataset.split = std::move(s);
  dataset.metadata["split_seed"] = std::to_string(seed);
  return dataset;
}

Dataset standardize(Dataset dataset) {
  if (!dataset.split) throw DataError("standardize needs a split; call split() first");
  const auto& train = dataset.split->train;
  if (train.empty()) throw DataError("standardize needs a non-empty training split");
  const std::size_t d = dataset.num_features();
  Standardization stats;
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (std::size_t i : train) mean += dataset.features(i, c);
    mean /= static_cast<double>(train.size());
    double var = 0.0;
    for (std::size_t i : train) {
      const double r = dataset.features(i, c) - mean;
      var += r * r;
    }
    const double sd = std::sqrt(var / static_cast<double>(train.size()));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      stats.dropped_columns.push_back(c);
      const std::string name = c < dataset.feature_names.size() ? dataset.feature_names[c] : std::to_string(c);
      dataset.warnings.push_back("dropped constant feature '" + name + "'");
      continue;
    }
    stats.kept_columns.push_back(c);
    stats.mean.push_back(mean);
    stats.sd.push_back(sd);
  }
  if (stats.kept_columns.empty()) throw DataError("every feature is constant on the training split");

  Matrix z(dataset.size(), stats.kept_columns.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (std::size_t k = 0; k < stats.kept_columns.size(); ++k) {
      z(i, k) = (dataset.features(i, stats.kept_columns[k]) - stats.mean[k]) / stats.sd[k];
    }
  }
  std::vector<std::string> names;
  for (std::size_t c : stats.kept_columns) {
    names.push_back(c < dataset.feature_names.size() ? dataset.feature_names[c] : "x" + std::to_string(c));
  }
  dataset.features = std::move(z);
  dataset.feature_names = std::move(names);
  dataset.standardization = std::move(stats);
  return dataset;
}

Matrix destandardize(const Matrix& standardized, const Standardization& stats) {
  Matrix raw(standardized.rows(), standardized.cols());
  for (std::size_t i = 0; i < standardized.rows(); ++i) {
    for (std::size_t k = 0; k < standardized.cols(); ++k) {
      raw(i, k) = standardized(i, k) * stats.sd[k] + stats.mean[k];
    }
  }
  return raw;
}

Dataset synthetic_gaussian(std::size_t n, std::size_t d, std::uint64_t seed, Vector beta, double sigma) {
  if (n < 1 || d < 1) throw DataError("synthetic_gaussian needs n >= 1 and d >= 1");
  if (sigma < 0.0) throw DataError("synthetic noise sd must be >= 0");
  const RandomStream root(seed, 0x5359'4e54ULL);  // "SYNT"
  if (beta.empty()) {
    RandomStream beta_rng = root.split(3);
    beta.resize(d);
    beta_rng.fill_normal(beta);
  }
  if (beta.size() != d) throw DataError("true beta length does not match d");
  RandomStream x_rng = root.split(1);
  RandomStream noise_rng = root.split(2);

  Dataset ds;
  ds.name = "synthetic_gaussian";
  ds.task = Task::Regression;
  ds.features = Matrix(n, d);
  x_rng.fill_normal(ds.features.data());
  ds.targets.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double y = 0.0;
    for (std::size_t j = 0; j < d; ++j) y += beta[j] * ds.features(i, j);
    ds.targets[i] = y + sigma * noise_rng.normal();
  }
  for (std::size_t j = 0; j < d; ++j) ds.feature_names.push_back("x" + std::to_string(j));
  ds.target_name = "y";
  nlohmann::json b = beta;
  ds.metadata["true_beta"] = b.dump();
  ds.metadata["sigma"] = nlohmann::json(sigma).dump();
  ds.metadata["seed"] = std::to_string(seed);
  return ds;
}

Matrix part_features(const Dataset& dataset, SplitPart part) {
  if (!dataset.split) {
    if (part == SplitPart::Train) return dataset.features;
    throw DataError("dataset has no split");
  }
  const auto& s = *dataset.split;
  const auto& idx = part == SplitPart::Train ? s.train : part == SplitPart::Validation ? s.validation : s.test;
  return select_rows(dataset.features, idx);
}

Vector part_targets(const Dataset& dataset, SplitPart part) {
  if (!dataset.split) {
    if (part == SplitPart::Train) return dataset.targets;
    throw DataError("dataset has no split");
  }
  const auto& s = *dataset.split;
  const auto& idx = part == SplitPart::Train ? s.train : part == SplitPart::Validation ? s.validation : s.test;
  Vector out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(dataset.targets[i]);
  return out;
}

std::string metadata_json(const Dataset& dataset) {
  nlohmann::ordered_json j;
  j["name"] = dataset.name;
  j["task"] = to_string(dataset.task);
  j["rows"] = dataset.size();
  j["features"] = dataset.num_features();
  j["feature_names"] = dataset.feature_names;
  j["target"] = dataset.target_name;
  if (dataset.task != Task::Regression) j["num_classes"] = dataset.num_classes;
  if (!dataset.class_labels.empty()) j["class_labels"] = dataset.class_labels;
  if (dataset.split) {
    j["split"] = {{"train", dataset.split->train.size()},
                  {"validation", dataset.split->validation.size()},
                  {"test", dataset.split->test.size()}};
  }
  if (dataset.standardization) {
    const auto& s = *dataset.standardization;
    j["standardization"] = {{"kept_columns", s.kept_columns},
                            {"mean", s.mean},
                            {"sd", s.sd},
                            {"dropped_columns", s.dropped_columns}};
  }
  j["warnings"] = dataset.warnings;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : dataset.metadata) meta[k] = v;
  j["metadata"] = meta;
  return j.dump(2);
}

void write_metadata(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << metadata_json(dataset) << '\n';
}

}  // namespace vrhmc
