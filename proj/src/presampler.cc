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

#include "relscm/presampler.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "relscm/error.h"
#include "row_kernel.h"

namespace relscm {
namespace {

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return s;
}

// Returns the nearest centroid (lowest index on ties) and its squared
// distance.
std::pair<size_t, double> Nearest(std::span<const double> x,
                                  const std::vector<NodeVector>& centroids) {
  size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < centroids.size(); ++k) {
    const double d = SquaredDistance(x, centroids[k]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return {best, best_d};
}

std::vector<NodeVector> KMeansPlusPlus(const SampleMatrix& samples, size_t k,
                                       Rng& rng) {
  std::vector<NodeVector> centroids;
  const size_t first = UniformIndex(rng, samples.rows);
  centroids.emplace_back(samples.row(first).begin(), samples.row(first).end());
  std::vector<double> d2(samples.rows);
  for (size_t r = 0; r < samples.rows; ++r)
    d2[r] = SquaredDistance(samples.row(r), centroids[0]);
  while (centroids.size() < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    const double target = UniformUnit(rng) * total;
    double acc = 0.0;
    size_t pick = samples.rows;
    size_t last_positive = 0;
    for (size_t r = 0; r < samples.rows; ++r) {
      if (d2[r] <= 0.0) continue;
      last_positive = r;
      acc += d2[r];
      if (acc > target) {
        pick = r;
        break;
      }
    }
    if (pick == samples.rows) pick = last_positive;
    centroids.emplace_back(samples.row(pick).begin(), samples.row(pick).end());
    for (size_t r = 0; r < samples.rows; ++r)
      d2[r] = std::min(d2[r], SquaredDistance(samples.row(r), centroids.back()));
  }
  return centroids;
}

}  // namespace

std::vector<SampleMatrix> Prerun(const DagSpec& dag, size_t num_presamples,
                                 uint64_t master_seed, Execution exec) {
  const size_t n = internal::HiddenDim(dag);
  std::vector<SampleMatrix> out(dag.size(), SampleMatrix(num_presamples, n));
  ForEachIndex(num_presamples, exec, [&](size_t r) {
    Rng rng = MakeStream(master_seed, tags::kPrerun, r);
    std::vector<double> values(dag.size() * n);
    std::vector<double> scratch;
    internal::EvaluateRow(dag, n, nullptr, nullptr, rng, values, scratch);
    for (NodeIndex i = 0; i < dag.size(); ++i) {
      std::copy_n(values.begin() + i * n, n, out[i].row(r).begin());
    }
  });
  return out;
}

double SortedQuantile(std::span<const double> sorted, double p) {
  const size_t m = sorted.size();
  const double h = p * static_cast<double>(m - 1);
  const size_t lo = static_cast<size_t>(std::floor(h));
  if (lo + 1 >= m) return sorted[m - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

QuantilePair ComputeQuantiles(const SampleMatrix& samples, double lo,
                              double hi) {
  if (samples.rows < 2) {
    throw Error(ErrorCode::kInvalidInput, "quantiles need at least 2 samples");
  }
  if (!(lo < hi) || lo < 0.0 || hi > 1.0) {
    throw Error(ErrorCode::kInvalidInput,
                "quantile probabilities must satisfy 0 <= lo < hi <= 1");
  }
  QuantilePair q;
  q.lo.resize(samples.dim);
  q.hi.resize(samples.dim);
  std::vector<double> column(samples.rows);
  for (size_t c = 0; c < samples.dim; ++c) {
    for (size_t r = 0; r < samples.rows; ++r) column[r] = samples.row(r)[c];
    std::sort(column.begin(), column.end());
    q.lo[c] = SortedQuantile(column, lo);
    q.hi[c] = SortedQuantile(column, hi);
  }
  return q;
}

size_t CountDistinctRows(const SampleMatrix& samples) {
  std::vector<std::vector<double>> rows;
  rows.reserve(samples.rows);
  for (size_t r = 0; r < samples.rows; ++r)
    rows.emplace_back(samples.row(r).begin(), samples.row(r).end());
  std::sort(rows.begin(), rows.end());
  return static_cast<size_t>(std::unique(rows.begin(), rows.end()) - rows.begin());
}

KMeansResult FitCodebook(const SampleMatrix& samples, int k, Rng& rng,
                         const KMeansParams& params) {
  if (k < 2) {
    throw Error(ErrorCode::kInvalidInput, "k-means needs K >= 2");
  }
  const size_t distinct = CountDistinctRows(samples);
  if (distinct < 2) {
    throw Error(ErrorCode::kInvalidInput,
                "k-means needs at least 2 distinct sample vectors");
  }
  KMeansResult result;
  size_t clusters = static_cast<size_t>(k);
  if (distinct < clusters) {
    clusters = distinct;
    result.reduced = true;
  }

  std::vector<NodeVector> centroids = KMeansPlusPlus(samples, clusters, rng);
  std::vector<size_t> assignment(samples.rows, 0);
  auto assign = [&]() {
    double objective = 0.0;
    for (size_t r = 0; r < samples.rows; ++r) {
      const auto [best, d] = Nearest(samples.row(r), centroids);
      assignment[r] = best;
      objective += d;
    }
    result.objective_trace.push_back(objective);
  };

  for (int iter = 0; iter < params.max_iterations; ++iter) {
    assign();
    std::vector<NodeVector> sums(clusters, NodeVector(samples.dim, 0.0));
    std::vector<size_t> counts(clusters, 0);
    for (size_t r = 0; r < samples.rows; ++r) {
      const auto row = samples.row(r);
      for (size_t c = 0; c < samples.dim; ++c) sums[assignment[r]][c] += row[c];
      ++counts[assignment[r]];
    }
    double shift = 0.0;
    for (size_t j = 0; j < clusters; ++j) {
      if (counts[j] == 0) continue;  // empty cluster keeps its centroid
      for (double& v : sums[j]) v /= static_cast<double>(counts[j]);
      shift = std::max(shift, std::sqrt(SquaredDistance(sums[j], centroids[j])));
      centroids[j] = std::move(sums[j]);
    }
    result.iterations = iter + 1;
    if (shift < params.tolerance) break;
  }
  assign();

  // Relabel by first appearance in the sample order.
  std::vector<size_t> order;
  std::vector<bool> seen(clusters, false);
  for (size_t r = 0; r < samples.rows; ++r) {
    if (!seen[assignment[r]]) {
      seen[assignment[r]] = true;
      order.push_back(assignment[r]);
    }
  }
  for (size_t j = 0; j < clusters; ++j)
    if (!seen[j]) order.push_back(j);
  for (size_t j : order) result.codebook.centroids.push_back(centroids[j]);
  result.codebook.fitted_on = samples.rows;
  return result;
}

PrerunStats ComputePrerunStats(DagSpec& dag, const PrerunParams& params,
                               uint64_t master_seed, Execution exec) {
  const std::vector<SampleMatrix> samples =
      Prerun(dag, params.num_presamples, master_seed, exec);
  PrerunStats stats;
  stats.num_presamples = params.num_presamples;
  stats.quantile_lo = params.quantile_lo;
  stats.quantile_hi = params.quantile_hi;
  for (NodeIndex i = 0; i < dag.size(); ++i) {
    stats.quantiles.push_back(
        ComputeQuantiles(samples[i], params.quantile_lo, params.quantile_hi));
  }
  for (NodeIndex i = 0; i < dag.size(); ++i) {
    NodeSpec& node = dag.mutable_node(i);
    if (!node.pooling.categorical()) continue;
    const size_t distinct = CountDistinctRows(samples[i]);
    if (distinct < 2) {
      node.pooling.kind = PoolingKind::kMean;
      node.category_count.reset();
      stats.warnings.push_back("node " + node.name +
                               ": constant pre-run data, categorical pooling "
                               "demoted to mean");
      continue;
    }
    Rng rng = MakeStream(master_seed, tags::kKMeans, i);
    KMeansResult fit =
        FitCodebook(samples[i], node.category_count.value_or(2), rng,
                    params.kmeans);
    if (fit.reduced) {
      stats.warnings.push_back(
          "node " + node.name + ": category count reduced from " +
          std::to_string(node.category_count.value_or(2)) + " to " +
          std::to_string(fit.codebook.size()));
      node.category_count = static_cast<int>(fit.codebook.size());
    }
    stats.codebooks.emplace(i, std::move(fit.codebook));
  }
  return stats;
}

}  // namespace relscm
