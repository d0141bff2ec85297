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

#ifndef RELSCM_SAMPLER_H_
#define RELSCM_SAMPLER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "relscm/graph.h"
#include "relscm/parallel.h"
#include "relscm/presampler.h"
#include "relscm/scm.h"
#include "relscm/table.h"

namespace relscm {

double PoolNorm(std::span<const double> x);
double PoolMean(std::span<const double> x);
// Even length: mean of the two middle values.
double PoolMedian(std::span<const double> x);
// Population variance (divides by n).
double PoolVariance(std::span<const double> x);
// Index of the nearest centroid in Euclidean distance; ties go to the
// lowest index.
int NearestCentroid(std::span<const double> x, const Codebook& codebook);

// Reads a node vector out to a scalar (or a category id as a double).
// Throws kContractViolation when a categorical spec has no codebook.
double Pool(std::span<const double> x, const PoolingSpec& spec,
            const Codebook* codebook);

// Content hash of a codebook, used to tie categorical columns together.
std::string CodebookId(const Codebook& codebook);

// Column header (name, kind, role, category count, codebook id) of node i;
// the role follows `dag`, in which sinks are targets.
Column MakeColumnHeader(const DagSpec& dag, NodeIndex i,
                        const PrerunStats& stats);

// Main sampling run. Row r draws from the stream (master_seed, run_tag, r):
// roots are sampled, every other node gets StructuralAssign with its
// quantiles and a fresh noise draw, and every node is pooled. Columns come
// in node-index order; sinks are targets. Output is independent of the
// thread count.
Table GenerateTable(const DagSpec& dag, const PrerunStats& stats,
                    size_t num_rows, const NoiseConfig& noise,
                    uint64_t master_seed, std::string_view run_tag,
                    Execution exec = Execution::kParallel);

}  // namespace relscm

#endif  // RELSCM_SAMPLER_H_
