// Copyright 2026 The relscm Authors
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

#ifndef RELSCM_EVAL_H_
#define RELSCM_EVAL_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relscm/parallel.h"
#include "relscm/relational.h"
#include "relscm/table.h"

namespace relscm {

enum class TaskKind { kRegression, kClassification };

struct FeatureColumn {
  std::string source_table;   // "main" or "additional"
  std::string source_column;
  std::string encoding;       // "standardized", "onehot:<cat>",
                              // "mean", "frequency:<cat>"
};

struct FeatureMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> values;  // row-major
  std::vector<FeatureColumn> descriptors;

  std::span<const double> row(size_t r) const {
    return {values.data() + r * cols, cols};
  }
};

// Statistics fitted on training rows only.
struct ColumnNorms {
  struct Entry {
    double mean = 0.0;
    double stddev = 1.0;
    std::vector<int> categories;  // sorted, observed in training rows
  };
  std::map<std::string, Entry> by_column;
};

inline constexpr double kStdFloor = 1e-12;

// Contiguous head/tail split; round(rows * test_fraction) test rows.
// Throws kInvalidParameter when test_fraction is outside (0, 1) or a side
// would be empty.
std::pair<Table, Table> Split(const Table& table, double test_fraction);

ColumnNorms FitNorms(const Table& train);

// Non-target columns of `rows`: numeric standardized with training
// statistics, categorical one-hot over training-observed categories (an
// unseen category encodes as a zero block).
FeatureMatrix FeaturizeMainOnly(const Table& rows, const ColumnNorms& norms);

// Per-key aggregates of the additional table, fitted once: numeric columns
// by mean, categorical by one-hot frequency. Keys absent from the table
// fall back to the global aggregate over all additional rows.
class KeyAggregator {
 public:
  KeyAggregator(const Table& add_table, const std::string& key_column);

  size_t width() const { return descriptors_.size(); }
  const std::vector<FeatureColumn>& descriptors() const {
    return descriptors_;
  }
  // Aggregate for a key, before standardization.
  std::span<const double> Lookup(int key) const;
  bool HasKey(int key) const { return by_key_.contains(key); }

 private:
  std::vector<FeatureColumn> descriptors_;
  std::map<int, std::vector<double>> by_key_;
  std::vector<double> fallback_;
};

// Standardization of aggregate columns, fitted on training main rows.
struct AggregateNorms {
  std::vector<double> mean;
  std::vector<double> stddev;
};

AggregateNorms FitAggregateNorms(const Table& train_main,
                                 const KeyAggregator& agg,
                                 const std::string& key_column);

// Main-only features followed by the standardized per-key aggregates of
// the additional table. Throws kContractViolation when the key columns of
// the two tables have different codebooks.
FeatureMatrix FeaturizeJoined(const Table& main_rows, const Table& add_table,
                              const std::string& key_column,
                              const ColumnNorms& norms,
                              const KeyAggregator& agg,
                              const AggregateNorms& agg_norms);

struct KnnParams {
  size_t k = 10;
  double epsilon = 1e-12;
};

// Indices and distances of the k nearest training rows per test row,
// ordered by (distance, training index).
struct Neighbors {
  size_t k = 0;
  std::vector<size_t> index;     // test_rows x k
  std::vector<double> distance;  // test_rows x k
};

Neighbors FindNeighbors(const FeatureMatrix& train, const FeatureMatrix& test,
                        size_t k, Execution exec = Execution::kParallel);

struct Predictions {
  TaskKind task = TaskKind::kRegression;
  std::vector<double> values;  // regression: one per row
  size_t num_classes = 0;
  std::vector<double> scores;  // classification: rows x num_classes
  size_t size() const {
    return task == TaskKind::kRegression ? values.size()
                                         : (num_classes ? scores.size() / num_classes : 0);
  }
  std::vector<int> HardLabels() const;
};

// Inverse-distance weighting w = 1 / (d + epsilon). If any neighbor is at
// distance exactly 0, only the zero-distance neighbors vote, unweighted.
Predictions PredictFromNeighbors(const Neighbors& nb,
                                 std::span<const double> train_y,
                                 TaskKind task, size_t num_classes,
                                 const KnnParams& params = {});

// FindNeighbors + PredictFromNeighbors. Throws kInvalidParameter when
// k exceeds the training rows and kContractViolation on width mismatch.
Predictions KnnPredict(const FeatureMatrix& train_x,
                       std::span<const double> train_y,
                       const FeatureMatrix& test_x, TaskKind task,
                       size_t num_classes, const KnnParams& params = {},
                       Execution exec = Execution::kParallel);

double Rmse(std::span<const double> predicted, std::span<const double> truth);

// Mann-Whitney AUC of `scores` for the positive labels, ties counted 1/2.
// Throws kUndefinedMetric when either class is empty.
double RankAuc(std::span<const double> scores, std::span<const bool> positive);

// RMSE for regression; AUC of the class-1 score for two classes; macro
// one-vs-rest AUC over the classes present in `truth` otherwise. Throws
// kUndefinedMetric when `truth` holds a single class.
double Score(const Predictions& predictions, std::span<const double> truth);

struct EvalParams {
  double test_fraction = 0.1;
  KnnParams knn;
  uint64_t seed = 0;
};

struct TargetResult {
  std::string column;
  TaskKind task = TaskKind::kRegression;
  std::string metric;  // "RMSE" or "AUC"
  std::optional<double> main_only;
  std::optional<double> joined;
  bool latently_affected = false;
  std::string note;  // set when a metric is undefined
};

struct EvalReport {
  std::vector<TargetResult> targets;
  std::string schema_fingerprint;
  uint64_t seed = 0;
  size_t train_rows = 0;
  size_t test_rows = 0;
  size_t add_rows = 0;
  size_t k = 0;
};

// Runs both conditions on the same split for every target column of the
// main table and tags targets reachable from the additional graph through
// a path that avoids C.
EvalReport RunComparison(const RelationalDataset& dataset,
                         const RelationalSchema& schema,
                         const EvalParams& params,
                         Execution exec = Execution::kParallel);

}  // namespace relscm

#endif  // RELSCM_EVAL_H_
