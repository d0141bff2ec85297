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

#include "relscm/eval.h"

#include <algorithm>
#include <map>
#include <memory>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "relscm/error.h"
#include "relscm/io.h"

namespace relscm {
namespace {

int Category(double v) { return static_cast<int>(std::llround(v)); }

double SafeStd(double s) { return std::max(s, kStdFloor); }

void MeanStd(std::span<const double> x, double& mean, double& stddev) {
  mean = 0.0;
  stddev = 0.0;
  if (x.empty()) return;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  for (double v : x) stddev += (v - mean) * (v - mean);
  stddev = std::sqrt(stddev / static_cast<double>(x.size()));
}

}  // namespace

std::pair<Table, Table> Split(const Table& table, double test_fraction) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidParameter,
                "test_fraction must lie strictly between 0 and 1");
  }
  const size_t rows = table.row_count();
  const size_t test = static_cast<size_t>(
      std::llround(static_cast<double>(rows) * test_fraction));
  if (test == 0 || test >= rows) {
    throw Error(ErrorCode::kInvalidParameter,
                "split of " + std::to_string(rows) + " rows leaves a side empty");
  }
  return {table.Slice(0, rows - test), table.Slice(rows - test, rows)};
}

ColumnNorms FitNorms(const Table& train) {
  ColumnNorms norms;
  for (const Column& c : train.columns()) {
    ColumnNorms::Entry e;
    if (c.categorical()) {
      std::set<int> seen;
      for (double v : c.values) seen.insert(Category(v));
      e.categories.assign(seen.begin(), seen.end());
    } else {
      MeanStd(c.values, e.mean, e.stddev);
    }
    norms.by_column[c.name] = std::move(e);
  }
  return norms;
}

namespace {

void EncodeMainFeatures(const Table& rows, const ColumnNorms& norms,
                        FeatureMatrix& m, size_t col_offset) {
  size_t j = col_offset;
  for (const Column& c : rows.columns()) {
    if (c.role == ColumnRole::kTarget) continue;
    const ColumnNorms::Entry& e = norms.by_column.at(c.name);
    if (c.categorical()) {
      for (size_t r = 0; r < rows.row_count(); ++r) {
        const int cat = Category(c.values[r]);
        auto it = std::lower_bound(e.categories.begin(), e.categories.end(), cat);
        if (it != e.categories.end() && *it == cat) {
          m.values[r * m.cols + j + (it - e.categories.begin())] = 1.0;
        }
      }
      j += e.categories.size();
    } else {
      const double sd = SafeStd(e.stddev);
      for (size_t r = 0; r < rows.row_count(); ++r) {
        m.values[r * m.cols + j] = (c.values[r] - e.mean) / sd;
      }
      ++j;
    }
  }
}

std::vector<FeatureColumn> MainDescriptors(const Table& rows,
                                           const ColumnNorms& norms) {
  std::vector<FeatureColumn> out;
  for (const Column& c : rows.columns()) {
    if (c.role == ColumnRole::kTarget) continue;
    const ColumnNorms::Entry& e = norms.by_column.at(c.name);
    if (c.categorical()) {
      for (int cat : e.categories)
        out.push_back({"main", c.name, "onehot:" + std::to_string(cat)});
    } else {
      out.push_back({"main", c.name, "standardized"});
    }
  }
  return out;
}

}  // namespace

FeatureMatrix FeaturizeMainOnly(const Table& rows, const ColumnNorms& norms) {
  FeatureMatrix m;
  m.rows = rows.row_count();
  m.descriptors = MainDescriptors(rows, norms);
  m.cols = m.descriptors.size();
  m.values.assign(m.rows * m.cols, 0.0);
  EncodeMainFeatures(rows, norms, m, 0);
  return m;
}

KeyAggregator::KeyAggregator(const Table& add_table,
                             const std::string& key_column) {
  const Column& key = add_table.column(key_column);
  struct Source {
    const Column* column;
    std::vector<int> categories;
  };
  std::vector<Source> sources;
  for (const Column& c : add_table.columns()) {
    if (c.name == key_column) continue;
    Source s{&c, {}};
    if (c.categorical()) {
      std::set<int> seen;
      for (double v : c.values) seen.insert(Category(v));
      s.categories.assign(seen.begin(), seen.end());
      for (int cat : s.categories)
        descriptors_.push_back({"additional", c.name, "frequency:" + std::to_string(cat)});
    } else {
      descriptors_.push_back({"additional", c.name, "mean"});
    }
    sources.push_back(std::move(s));
  }

  const size_t width = descriptors_.size();
  std::map<int, size_t> counts;
  fallback_.assign(width, 0.0);
  for (size_t r = 0; r < add_table.row_count(); ++r) {
    const int k = Category(key.values[r]);
    auto [it, inserted] = by_key_.try_emplace(k, width, 0.0);
    std::vector<double>& acc = it->second;
    ++counts[k];
    size_t j = 0;
    for (const Source& s : sources) {
      const double v = s.column->values[r];
      if (s.column->categorical()) {
        const auto pos = std::lower_bound(s.categories.begin(), s.categories.end(), Category(v)) -
                         s.categories.begin();
        acc[j + pos] += 1.0;
        fallback_[j + pos] += 1.0;
        j += s.categories.size();
      } else {
        acc[j] += v;
        fallback_[j] += v;
        ++j;
      }
    }
  }
  for (auto& [k, acc] : by_key_) {
    for (double& v : acc) v /= static_cast<double>(counts[k]);
  }
  if (add_table.row_count() > 0) {
    for (double& v : fallback_) v /= static_cast<double>(add_table.row_count());
  }
}

std::span<const double> KeyAggregator::Lookup(int key) const {
  auto it = by_key_.find(key);
  return it == by_key_.end() ? std::span<const double>(fallback_)
                             : std::span<const double>(it->second);
}

AggregateNorms FitAggregateNorms(const Table& train_main,
                                 const KeyAggregator& agg,
                                 const std::string& key_column) {
  const Column& key = train_main.column(key_column);
  const size_t width = agg.width();
  AggregateNorms norms;
  norms.mean.assign(width, 0.0);
  norms.stddev.assign(width, 0.0);
  const size_t rows = train_main.row_count();
  if (rows == 0) return norms;
  for (size_t r = 0; r < rows; ++r) {
    const auto a = agg.Lookup(Category(key.values[r]));
    for (size_t j = 0; j < width; ++j) norms.mean[j] += a[j];
  }
  for (double& m : norms.mean) m /= static_cast<double>(rows);
  for (size_t r = 0; r < rows; ++r) {
    const auto a = agg.Lookup(Category(key.values[r]));
    for (size_t j = 0; j < width; ++j) {
      const double d = a[j] - norms.mean[j];
      norms.stddev[j] += d * d;
    }
  }
  for (double& s : norms.stddev) s = std::sqrt(s / static_cast<double>(rows));
  return norms;
}

FeatureMatrix FeaturizeJoined(const Table& main_rows, const Table& add_table,
                              const std::string& key_column,
                              const ColumnNorms& norms,
                              const KeyAggregator& agg,
                              const AggregateNorms& agg_norms) {
  const Column& main_key = main_rows.column(key_column);
  const Column& add_key = add_table.column(key_column);
  if (!main_key.categorical() || !add_key.categorical() ||
      main_key.codebook_id != add_key.codebook_id) {
    throw Error(ErrorCode::kContractViolation,
                "key column " + key_column +
                    " does not share one codebook across the tables");
  }
  FeatureMatrix m;
  m.rows = main_rows.row_count();
  m.descriptors = MainDescriptors(main_rows, norms);
  const size_t main_width = m.descriptors.size();
  m.descriptors.insert(m.descriptors.end(), agg.descriptors().begin(),
                       agg.descriptors().end());
  m.cols = m.descriptors.size();
  m.values.assign(m.rows * m.cols, 0.0);
  EncodeMainFeatures(main_rows, norms, m, 0);
  for (size_t r = 0; r < m.rows; ++r) {
    const auto a = agg.Lookup(Category(main_key.values[r]));
    for (size_t j = 0; j < agg.width(); ++j) {
      m.values[r * m.cols + main_width + j] =
          (a[j] - agg_norms.mean[j]) / SafeStd(agg_norms.stddev[j]);
    }
  }
  return m;
}

Neighbors FindNeighbors(const FeatureMatrix& train, const FeatureMatrix& test,
                        size_t k, Execution exec) {
  if (train.cols != test.cols) {
    throw Error(ErrorCode::kContractViolation,
                "train and test features differ in width");
  }
  if (k == 0 || k > train.rows) {
    throw Error(ErrorCode::kInvalidParameter,
                "k = " + std::to_string(k) + " needs 1 <= k <= " +
                    std::to_string(train.rows) + " training rows");
  }
  Neighbors nb;
  nb.k = k;
  nb.index.resize(test.rows * k);
  nb.distance.resize(test.rows * k);
  const size_t width = train.cols;
  ForEachIndex(test.rows, exec, [&](size_t t) {
    const double* q = test.values.data() + t * width;
    std::vector<std::pair<double, size_t>> d2(train.rows);
    for (size_t r = 0; r < train.rows; ++r) {
      const double* x = train.values.data() + r * width;
      double s = 0.0;
      for (size_t c = 0; c < width; ++c) {
        const double d = q[c] - x[c];
        s += d * d;
      }
      d2[r] = {s, r};
    }
    std::nth_element(d2.begin(), d2.begin() + (k - 1), d2.end());
    std::sort(d2.begin(), d2.begin() + k);
    for (size_t j = 0; j < k; ++j) {
      nb.index[t * k + j] = d2[j].second;
      nb.distance[t * k + j] = std::sqrt(d2[j].first);
    }
  });
  return nb;
}

std::vector<int> Predictions::HardLabels() const {
  std::vector<int> out;
  for (size_t r = 0; r < size(); ++r) {
    const double* s = scores.data() + r * num_classes;
    out.push_back(static_cast<int>(std::max_element(s, s + num_classes) - s));
  }
  return out;
}

Predictions PredictFromNeighbors(const Neighbors& nb,
                                 std::span<const double> train_y,
                                 TaskKind task, size_t num_classes,
                                 const KnnParams& params) {
  const size_t k = nb.k;
  const size_t rows = k ? nb.index.size() / k : 0;
  Predictions p;
  p.task = task;
  if (task == TaskKind::kRegression) {
    p.values.resize(rows);
  } else {
    if (num_classes == 0) {
      throw Error(ErrorCode::kInvalidParameter, "classification needs classes");
    }
    p.num_classes = num_classes;
    p.scores.assign(rows * num_classes, 0.0);
  }
  std::vector<double> w(k);
  for (size_t t = 0; t < rows; ++t) {
    const size_t* idx = nb.index.data() + t * k;
    const double* dist = nb.distance.data() + t * k;
    bool exact = false;
    for (size_t j = 0; j < k; ++j) exact |= dist[j] == 0.0;
    double total = 0.0;
    for (size_t j = 0; j < k; ++j) {
      w[j] = exact ? (dist[j] == 0.0 ? 1.0 : 0.0) : 1.0 / (dist[j] + params.epsilon);
      total += w[j];
    }
    if (task == TaskKind::kRegression) {
      double acc = 0.0;
      for (size_t j = 0; j < k; ++j) acc += w[j] * train_y[idx[j]];
      p.values[t] = acc / total;
    } else {
      double* s = p.scores.data() + t * num_classes;
      for (size_t j = 0; j < k; ++j) {
        const int label = Category(train_y[idx[j]]);
        if (label < 0 || static_cast<size_t>(label) >= num_classes) {
          throw Error(ErrorCode::kInvalidInput, "training label out of range");
        }
        s[label] += w[j];
      }
      for (size_t c = 0; c < num_classes; ++c) s[c] /= total;
    }
  }
  return p;
}

Predictions KnnPredict(const FeatureMatrix& train_x,
                       std::span<const double> train_y,
                       const FeatureMatrix& test_x, TaskKind task,
                       size_t num_classes, const KnnParams& params,
                       Execution exec) {
  if (train_y.size() != train_x.rows) {
    throw Error(ErrorCode::kContractViolation,
                "training targets do not match training rows");
  }
  const Neighbors nb = FindNeighbors(train_x, test_x, params.k, exec);
  return PredictFromNeighbors(nb, train_y, task, num_classes, params);
}

double Rmse(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size() || truth.empty()) {
    throw Error(ErrorCode::kInvalidInput, "RMSE needs equal, non-empty inputs");
  }
  double s = 0.0;
  for (size_t i = 0; i < truth.size(); ++i) {
    const double d = predicted[i] - truth[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(truth.size()));
}

double RankAuc(std::span<const double> scores, std::span<const bool> positive) {
  if (scores.size() != positive.size()) {
    throw Error(ErrorCode::kInvalidInput, "AUC needs equal-length inputs");
  }
  const size_t m = scores.size();
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  size_t pos = 0;
  for (size_t i = 0; i < m;) {
    size_t j = i;
    while (j < m && scores[order[j]] == scores[order[i]]) ++j;
    // Average 1-based rank of the tie group [i, j).
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (size_t t = i; t < j; ++t) {
      if (positive[order[t]]) {
        rank_sum += rank;
        ++pos;
      }
    }
    i = j;
  }
  const size_t neg = m - pos;
  if (pos == 0 || neg == 0) {
    throw Error(ErrorCode::kUndefinedMetric, "AUC needs both classes present");
  }
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

double Score(const Predictions& predictions, std::span<const double> truth) {
  if (predictions.size() != truth.size()) {
    throw Error(ErrorCode::kInvalidInput, "prediction and truth lengths differ");
  }
  if (predictions.task == TaskKind::kRegression) {
    return Rmse(predictions.values, truth);
  }
  const size_t k = predictions.num_classes;
  std::set<int> present;
  for (double v : truth) present.insert(Category(v));
  if (present.size() < 2) {
    throw Error(ErrorCode::kUndefinedMetric,
                "classification truth holds a single class");
  }
  auto class_auc = [&](int c) {
    std::vector<double> s(truth.size());
    std::unique_ptr<bool[]> positive(new bool[truth.size()]);
    for (size_t r = 0; r < truth.size(); ++r) {
      s[r] = predictions.scores[r * k + c];
      positive[r] = Category(truth[r]) == c;
    }
    return RankAuc(s, std::span<const bool>(positive.get(), truth.size()));
  };
  if (k == 2) return class_auc(1);
  double sum = 0.0;
  for (int c : present) {
    if (c < 0 || static_cast<size_t>(c) >= k) {
      throw Error(ErrorCode::kInvalidInput, "truth label out of range");
    }
    sum += class_auc(c);
  }
  return sum / static_cast<double>(present.size());
}

EvalReport RunComparison(const RelationalDataset& dataset,
                         const RelationalSchema& schema,
                         const EvalParams& params, Execution exec) {
  const std::string fingerprint = SchemaFingerprint(schema, dataset.stats);
  if (dataset.main_table.provenance.schema_fingerprint != fingerprint ||
      dataset.add_table.provenance.schema_fingerprint != fingerprint) {
    throw Error(ErrorCode::kContractViolation,
                "dataset was not generated from this schema");
  }
  const Table& main = dataset.main_table;
  const std::string key = schema.merged.node(schema.coupling).name;
  auto [train, test] = Split(main, params.test_fraction);

  const ColumnNorms norms = FitNorms(train);
  const FeatureMatrix train_main = FeaturizeMainOnly(train, norms);
  const FeatureMatrix test_main = FeaturizeMainOnly(test, norms);
  const KeyAggregator agg(dataset.add_table, key);
  const AggregateNorms agg_norms = FitAggregateNorms(train, agg, key);
  const FeatureMatrix train_joined =
      FeaturizeJoined(train, dataset.add_table, key, norms, agg, agg_norms);
  const FeatureMatrix test_joined =
      FeaturizeJoined(test, dataset.add_table, key, norms, agg, agg_norms);

  // Target columns are excluded from both feature sets, so one neighbor
  // search per condition serves every target.
  const Neighbors nb_main = FindNeighbors(train_main, test_main, params.knn.k, exec);
  const Neighbors nb_joined =
      FindNeighbors(train_joined, test_joined, params.knn.k, exec);

  std::set<std::string> affected;
  for (NodeIndex i : LatentlyAffectedTargets(schema))
    affected.insert(schema.merged.node(i).name);

  EvalReport report;
  report.schema_fingerprint = fingerprint;
  report.seed = params.seed;
  report.train_rows = train.row_count();
  report.test_rows = test.row_count();
  report.add_rows = dataset.add_table.row_count();
  report.k = params.knn.k;
  for (size_t ci : main.TargetColumns()) {
    const Column& target = main.column(ci);
    TargetResult res;
    res.column = target.name;
    res.task = target.categorical() ? TaskKind::kClassification
                                    : TaskKind::kRegression;
    res.metric = target.categorical() ? "AUC" : "RMSE";
    res.latently_affected = affected.contains(target.name);
    const size_t classes =
        target.categorical() ? static_cast<size_t>(target.category_count) : 0;
    const auto& train_y = train.column(ci).values;
    const auto& truth = test.column(ci).values;
    try {
      res.main_only = Score(
          PredictFromNeighbors(nb_main, train_y, res.task, classes, params.knn),
          truth);
      res.joined = Score(
          PredictFromNeighbors(nb_joined, train_y, res.task, classes, params.knn),
          truth);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUndefinedMetric) throw;
      res.main_only.reset();
      res.joined.reset();
      res.note = e.what();
    }
    report.targets.push_back(std::move(res));
  }
  return report;
}

}  // namespace relscm
