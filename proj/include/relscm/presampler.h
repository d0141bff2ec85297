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

#ifndef RELSCM_PRESAMPLER_H_
#define RELSCM_PRESAMPLER_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "relscm/graph.h"
#include "relscm/parallel.h"
#include "relscm/rng.h"
#include "relscm/scm.h"

namespace relscm {

// Row-major samples x dim matrix.
struct SampleMatrix {
  size_t rows = 0;
  size_t dim = 0;
  std::vector<double> values;

  SampleMatrix() = default;
  SampleMatrix(size_t r, size_t d) : rows(r), dim(d), values(r * d, 0.0) {}

  std::span<double> row(size_t r) { return {values.data() + r * dim, dim}; }
  std::span<const double> row(size_t r) const {
    return {values.data() + r * dim, dim};
  }
  bool operator==(const SampleMatrix&) const = default;
};

struct Codebook {
  std::vector<NodeVector> centroids;
  size_t fitted_on = 0;

  size_t size() const { return centroids.size(); }
  bool operator==(const Codebook&) const = default;
};

struct KMeansParams {
  int max_iterations = 100;
  double tolerance = 1e-8;

  bool operator==(const KMeansParams&) const = default;
};

struct KMeansResult {
  Codebook codebook;
  // Requested K reduced to the number of distinct sample vectors.
  bool reduced = false;
  int iterations = 0;
  // Within-cluster sum of squares after every assignment step.
  std::vector<double> objective_trace;
};

struct PrerunStats {
  std::vector<QuantilePair> quantiles;
  std::map<NodeIndex, Codebook> codebooks;
  size_t num_presamples = 0;
  double quantile_lo = 0.1;
  double quantile_hi = 0.9;
  std::vector<std::string> warnings;

  bool operator==(const PrerunStats&) const = default;
};

struct PrerunParams {
  size_t num_presamples = 1000;
  double quantile_lo = 0.1;
  double quantile_hi = 0.9;
  KMeansParams kmeans;

  bool operator==(const PrerunParams&) const = default;
};

// Noiseless run: roots are sampled and every other node is Propagate of its
// parents. Returns one num_presamples x n matrix per node. Row r draws from
// the stream (master_seed, kPrerun, r). Throws kNumerical naming the node
// and its activation on a non-finite value.
std::vector<SampleMatrix> Prerun(const DagSpec& dag, size_t num_presamples,
                                 uint64_t master_seed,
                                 Execution exec = Execution::kParallel);

// Linear-interpolation quantile of already sorted values: h = p (m - 1),
// x[floor h] + (h - floor h) (x[floor h + 1] - x[floor h]).
double SortedQuantile(std::span<const double> sorted, double p);

// Component-wise quantiles of a samples matrix. Throws kInvalidInput with
// fewer than 2 samples or lo >= hi.
QuantilePair ComputeQuantiles(const SampleMatrix& samples, double lo = 0.1,
                              double hi = 0.9);

// k-means++ seeding and Lloyd iterations until every centroid moves less
// than the tolerance or the iteration cap is hit. Centroids come back in
// order of their first assigned sample. If fewer than K distinct vectors
// exist, K is reduced to that count and `reduced` is set. Throws
// kInvalidInput if K < 2 or fewer than 2 distinct vectors exist.
KMeansResult FitCodebook(const SampleMatrix& samples, int k, Rng& rng,
                         const KMeansParams& params = {});

size_t CountDistinctRows(const SampleMatrix& samples);

// Pre-run plus statistics. Categorical nodes whose pre-run data has fewer
// than 2 distinct vectors are demoted to mean pooling, and nodes with fewer
// distinct vectors than categories get a reduced category count; both
// changes are written back to `dag` and recorded in the warnings. k-means
// for node i uses the stream (master_seed, kKMeans, i).
PrerunStats ComputePrerunStats(DagSpec& dag, const PrerunParams& params,
                               uint64_t master_seed,
                               Execution exec = Execution::kParallel);

}  // namespace relscm

#endif  // RELSCM_PRESAMPLER_H_
