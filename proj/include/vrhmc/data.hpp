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
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vrhmc/linalg.hpp"

namespace vrhmc {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Task { Regression, Binary, Multiclass };

std::string to_string(Task task);
Task parse_task(const std::string& text);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Per-feature z-score parameters fitted on the training rows.
struct Standardization {
  std::vector<std::size_t> kept_columns;  // indices into the raw feature columns
  Vector mean;
  Vector sd;
  std::vector<std::size_t> dropped_columns;
};

struct Dataset {
  std::string name;
  std::vector<std::string> feature_names;
  std::string target_name;
  Matrix features;
  Vector targets;
  Task task = Task::Regression;
  std::size_t num_classes = 0;  // Binary: 2, Multiclass: K
  std::optional<Split> split;
  std::optional<Standardization> standardization;
  /// Original label text for each class id, when labels were remapped.
  std::vector<std::string> class_labels;
  std::vector<std::string> warnings;
  /// Free-form provenance for the metadata sidecar.
  std::map<std::string, std::string> metadata;

  std::size_t size() const { return features.rows(); }
  std::size_t num_features() const { return features.cols(); }
};

struct CsvSchema {
  /// Column name (requires a header) or 0-based index.
  std::variant<std::string, std::size_t> target_column = std::size_t{0};
  bool has_header = true;
  Task task = Task::Regression;
  /// Multiclass: if set, labels must be integers in [0, K). If unset, distinct
  /// labels are mapped to 0..K-1 in sorted order and recorded in class_labels.
  std::optional<std::size_t> num_classes;
};

/// Reads a comma-separated file. Rows must have uniform arity and contain only
/// numeric values ('.' decimal point) apart from the header; errors carry the
/// line number.
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);

/// Writes features then the target as the last column, with a header row.
void write_csv(const Dataset& dataset, const std::filesystem::path& path);

/// Seeded uniform shuffle, then contiguous slices of floor(r0 n), floor(r1 n)
/// and the remainder.
Dataset split(Dataset dataset, double train_ratio, double validation_ratio, double test_ratio,
              std::uint64_t seed);
inline Dataset split(Dataset dataset, std::uint64_t seed) {
  return split(std::move(dataset), 0.7, 0.1, 0.2, seed);
}

/// Z-scores every feature with training-split statistics and drops features
/// that are constant on the training rows (recorded as warnings).
Dataset standardize(Dataset dataset);

/// Maps standardized rows back to raw units for the retained columns.
Matrix destandardize(const Matrix& standardized, const Standardization& stats);

/// x_i ~ N(0, I_d), y_i = beta^T x_i + sigma * eps_i. An empty `beta` draws
/// beta ~ N(0, I_d) from the same seed.
Dataset synthetic_gaussian(std::size_t n, std::size_t d, std::uint64_t seed, Vector beta, double sigma);

/// Rows of the dataset for one split part.
enum class SplitPart { Train, Validation, Test };
Matrix part_features(const Dataset& dataset, SplitPart part);
Vector part_targets(const Dataset& dataset, SplitPart part);

/// JSON sidecar describing the dataset: shape, split sizes, standardization,
/// warnings and metadata.
std::string metadata_json(const Dataset& dataset);
void write_metadata(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace vrhmc
