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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "vrhmc/data.hpp"
#include "vrhmc/random.hpp"

using namespace vrhmc;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    RandomStream rng(static_cast<std::uint64_t>(std::hash<std::string>{}(fs::current_path().string())) ^
                     static_cast<std::uint64_t>(reinterpret_cast<std::uintptr_t>(this)));
    path_ = fs::temp_directory_path() / ("vrhmc_data_" + std::to_string(rng.next_u64()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path file(const std::string& name, const std::string& body) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << body;
    return p;
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

Dataset table(std::size_t n, std::size_t d, std::uint64_t seed) {
  Dataset ds;
  ds.features = Matrix(n, d, 0.0);
  ds.targets = Vector(n);
  RandomStream rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) ds.features(i, j) = 3.0 + 2.0 * rng.normal();
    ds.targets[i] = static_cast<double>(i);
  }
  for (std::size_t j = 0; j < d; ++j) ds.feature_names.push_back("f" + std::to_string(j));
  return ds;
}

}  // namespace

TEST_CASE("csv loading") {
  TempDir dir;
  SUBCASE("named target, header, blank lines") {
    const auto p = dir.file("a.csv", "a,b,y\n1,2,3\n\n4.5,-6,7e-1\n");
    CsvSchema schema;
    schema.target_column = std::string("y");
    const Dataset ds = load_csv(p, schema);
    CHECK(ds.size() == 2);
    CHECK(ds.num_features() == 2);
    CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
    CHECK(ds.target_name == "y");
    CHECK(ds.features(1, 0) == 4.5);
    CHECK(ds.features(1, 1) == -6.0);
    CHECK(ds.targets == Vector{3.0, 0.7});
  }
  SUBCASE("index target without header") {
    const auto p = dir.file("b.csv", "1,0,2\n3,1,4\n");
    CsvSchema schema;
    schema.target_column = std::size_t{1};
    schema.has_header = false;
    schema.task = Task::Binary;
    const Dataset ds = load_csv(p, schema);
    CHECK(ds.targets == Vector{0.0, 1.0});
    CHECK(ds.features(1, 1) == 4.0);
    CHECK(ds.num_classes == 2);
  }
  SUBCASE("errors carry the line number") {
    CsvSchema schema;
    schema.target_column = std::string("y");
    CHECK_THROWS_WITH_AS(load_csv(dir.file("c.csv", "a,y\n1,2\n3\n"), schema), doctest::Contains(":3"), DataError);
    CHECK_THROWS_WITH_AS(load_csv(dir.file("d.csv", "a,y\n1,2\nx,4\n"), schema), doctest::Contains(":3"),
                         DataError);
    CHECK_THROWS_AS(load_csv(dir.file("e.csv", "a,y\n"), schema), DataError);
    CHECK_THROWS_AS(load_csv(dir.file("f.csv", ""), schema), DataError);
    CHECK_THROWS_AS(load_csv(dir.file("g.csv", "a,z\n1,2\n"), schema), DataError);
    CHECK_THROWS_AS(load_csv(dir.path() / "missing.csv", schema), DataError);
    schema.task = Task::Binary;
    CHECK_THROWS_AS(load_csv(dir.file("h.csv", "a,y\n1,2\n"), schema), DataError);
  }
  SUBCASE("multiclass labels are remapped in numeric order") {
    CsvSchema schema;
    schema.target_column = std::string("y");
    schema.task = Task::Multiclass;
    const Dataset ds = load_csv(dir.file("m.csv", "a,y\n1,10\n2,2\n3,10\n4,7\n"), schema);
    CHECK(ds.num_classes == 3);
    CHECK(ds.class_labels == std::vector<std::string>{"2", "7", "10"});
    CHECK(ds.targets == Vector{2, 0, 2, 1});
    schema.num_classes = 3;
    CHECK_THROWS_AS(load_csv(dir.file("n.csv", "a,y\n1,3\n"), schema), DataError);
  }
  SUBCASE("round trip") {
    Dataset ds = table(6, 3, 4);
    ds.target_name = "t";
    const fs::path p = dir.path() / "rt.csv";
    write_csv(ds, p);
    CsvSchema schema;
    schema.target_column = std::string("t");
    const Dataset back = load_csv(p, schema);
    CHECK(back.features == ds.features);
    CHECK(back.targets == ds.targets);
    CHECK(back.feature_names == ds.feature_names);
  }
}

TEST_CASE("split sizes and determinism") {
  Dataset small = split(table(10, 2, 1), 3);
  CHECK(small.split->train.size() == 7);
  CHECK(small.split->validation.size() == 1);
  CHECK(small.split->test.size() == 2);

  const Dataset a = split(table(768, 2, 1), 9);
  CHECK(a.split->train.size() == 537);
  CHECK(a.split->validation.size() == 76);
  CHECK(a.split->test.size() == 155);
  std::set<std::size_t> all(a.split->train.begin(), a.split->train.end());
  all.insert(a.split->validation.begin(), a.split->validation.end());
  all.insert(a.split->test.begin(), a.split->test.end());
  CHECK(all.size() == 768);

  const Dataset b = split(table(768, 2, 1), 9);
  CHECK(a.split->train == b.split->train);
  CHECK(a.split->test == b.split->test);
  const Dataset c = split(table(768, 2, 1), 10);
  CHECK(a.split->train != c.split->train);

  CHECK_THROWS_AS(split(table(2, 1, 1), 0), DataError);
  CHECK_THROWS_AS(split(table(10, 1, 1), 0.5, 0.5, 0.5, 1), DataError);
}

TEST_CASE("standardization uses training statistics") {
  Dataset ds = table(200, 3, 5);
  for (std::size_t i = 0; i < ds.size(); ++i) ds.features(i, 1) = 4.0;
  ds = standardize(split(std::move(ds), 2));
  REQUIRE(ds.num_features() == 2);
  CHECK(ds.feature_names == std::vector<std::string>{"f0", "f2"});
  CHECK(ds.warnings.size() == 1);
  CHECK(ds.standardization->dropped_columns == std::vector<std::size_t>{1});

  const Matrix train = part_features(ds, SplitPart::Train);
  const Matrix test = part_features(ds, SplitPart::Test);
  for (std::size_t j = 0; j < 2; ++j) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < train.rows(); ++i) s += train(i, j);
    const double mean = s / train.rows();
    for (std::size_t i = 0; i < train.rows(); ++i) s2 += (train(i, j) - mean) * (train(i, j) - mean);
    CHECK(std::abs(mean) < 1e-10);
    CHECK(std::abs(std::sqrt(s2 / train.rows()) - 1.0) < 1e-10);
    double t = 0.0;
    for (std::size_t i = 0; i < test.rows(); ++i) t += test(i, j);
    CHECK(t / test.rows() != 0.0);
  }

  const Matrix raw = destandardize(train, *ds.standardization);
  const Dataset orig = split(table(200, 3, 5), 2);
  for (std::size_t r = 0; r < 5; ++r) {
    const std::size_t row = orig.split->train[r];
    CHECK(raw(r, 0) == doctest::Approx(orig.features(row, 0)).epsilon(1e-12));
    CHECK(raw(r, 1) == doctest::Approx(orig.features(row, 2)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(standardize(table(10, 2, 1)), DataError);
}

TEST_CASE("synthetic gaussian data") {
  const Dataset zero = synthetic_gaussian(20, 3, 1, Vector{0, 0, 0}, 0.0);
  for (double y : zero.targets) CHECK(y == 0.0);
  const Dataset a = synthetic_gaussian(50, 4, 7, {}, 1.0);
  const Dataset b = synthetic_gaussian(50, 4, 7, {}, 1.0);
  CHECK(a.features == b.features);
  CHECK(a.targets == b.targets);
  CHECK(a.features != synthetic_gaussian(50, 4, 8, {}, 1.0).features);
  const Dataset exact = synthetic_gaussian(10, 2, 3, Vector{1.0, -2.0}, 0.0);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(exact.targets[i] == doctest::Approx(exact.features(i, 0) - 2.0 * exact.features(i, 1)));
  }
}

TEST_CASE("metadata sidecar") {
  const Dataset ds = standardize(split(table(30, 2, 1), 4));
  const std::string json = metadata_json(ds);
  CHECK(json.find("\"rows\": 30") != std::string::npos);
  CHECK(json.find("\"train\": 21") != std::string::npos);
  CHECK(json.find("standardization") != std::string::npos);
}
