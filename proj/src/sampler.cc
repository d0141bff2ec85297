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

#include "relscm/sampler.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "relscm/error.h"
#include "relscm/io.h"
#include "row_kernel.h"

namespace relscm {

double PoolNorm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double PoolMean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double PoolMedian(std::span<const double> x) {
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const size_t m = sorted.size();
  if (m % 2 == 1) return sorted[m / 2];
  return 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
}

double PoolVariance(std::span<const double> x) {
  const double mean = PoolMean(x);
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return s / static_cast<double>(x.size());
}

int NearestCentroid(std::span<const double> x, const Codebook& codebook) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < codebook.centroids.size(); ++k) {
    const NodeVector& v = codebook.centroids[k];
    double d = 0.0;
    for (size_t c = 0; c < x.size(); ++c) d += (x[c] - v[c]) * (x[c] - v[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

double Pool(std::span<const double> x, const PoolingSpec& spec,
            const Codebook* codebook) {
  switch (spec.kind) {
    case PoolingKind::kNorm: return PoolNorm(x);
    case PoolingKind::kMean: return PoolMean(x);
    case PoolingKind::kMedian: return PoolMedian(x);
    case PoolingKind::kVariance: return PoolVariance(x);
    case PoolingKind::kCategorical:
      if (codebook == nullptr || codebook->centroids.empty()) {
        throw Error(ErrorCode::kContractViolation,
                    "categorical pooling without a codebook");
      }
      return NearestCentroid(x, *codebook);
  }
  return 0.0;
}

std::string CodebookId(const Codebook& codebook) {
  std::string text;
  for (const NodeVector& c : codebook.centroids) {
    for (double v : c) {
      text += FormatDouble(v);
      text += ',';
    }
    text += ';';
  }
  return Sha256Hex(text).substr(0, 16);
}

Column MakeColumnHeader(const DagSpec& dag, NodeIndex i,
                        const PrerunStats& stats) {
  const NodeSpec& node = dag.node(i);
  Column col;
  col.name = node.name;
  col.role = dag.IsSink(i) ? ColumnRole::kTarget : ColumnRole::kFeature;
  if (node.pooling.categorical()) {
    auto it = stats.codebooks.find(i);
    if (it == stats.codebooks.end()) {
      throw Error(ErrorCode::kContractViolation,
                  "categorical node " + node.name + " has no codebook");
    }
    col.kind = ColumnKind::kCategorical;
    col.category_count = static_cast<int>(it->second.size());
    col.codebook_id = CodebookId(it->second);
  }
  return col;
}

Table GenerateTable(const DagSpec& dag, const PrerunStats& stats,
                    size_t num_rows, const NoiseConfig& noise,
                    uint64_t master_seed, std::string_view run_tag,
                    Execution exec) {
  if (stats.quantiles.size() != dag.size()) {
    throw Error(ErrorCode::kContractViolation,
                "pre-run statistics do not cover the graph");
  }
  noise.Validate();
  const size_t n = internal::HiddenDim(dag);
  std::vector<const Codebook*> codebooks(dag.size(), nullptr);
  std::vector<Column> columns;
  for (NodeIndex i = 0; i < dag.size(); ++i) {
    columns.push_back(MakeColumnHeader(dag, i, stats));
    columns.back().values.resize(num_rows);
    if (dag.node(i).pooling.categorical()) codebooks[i] = &stats.codebooks.at(i);
  }

  ForEachIndex(num_rows, exec, [&](size_t r) {
    Rng rng = MakeStream(master_seed, run_tag, r);
    std::vector<double> values(dag.size() * n);
    std::vector<double> scratch;
    internal::EvaluateRow(dag, n, &stats.quantiles, &noise, rng, values,
                          scratch);
    for (NodeIndex i = 0; i < dag.size(); ++i) {
      columns[i].values[r] =
          Pool(std::span<const double>(values.data() + i * n, n),
               dag.node(i).pooling, codebooks[i]);
    }
  });

  Table table(std::move(columns), num_rows);
  table.provenance.master_seed = master_seed;
  table.provenance.run_tag = std::string(run_tag);
  return table;
}

}  // namespace relscm
