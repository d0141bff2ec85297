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

#ifndef RELSCM_SRC_ROW_KERNEL_H_
#define RELSCM_SRC_ROW_KERNEL_H_

#include <span>
#include <vector>

#include "relscm/graph.h"
#include "relscm/rng.h"
#include "relscm/scm.h"

namespace relscm::internal {

// Evaluates every node of one row in index order into `values` (node-major,
// dag.size() x n). With `quantiles` and `noise` set, non-root nodes get
// quantile-scaled noise; otherwise the pass is noiseless. Roots are only
// sampled, never perturbed. Draw order per row: the per-sample noise mask
// (if that granularity is active), then per node either the root draws or
// the noise draws.
void EvaluateRow(const DagSpec& dag, size_t n,
                 const std::vector<QuantilePair>* quantiles,
                 const NoiseConfig* noise, Rng& rng, std::span<double> values,
                 std::vector<double>& scratch);

// Hidden dimension of an annotated DAG, read off the first propagation
// function (1 if the DAG has no edges).
size_t HiddenDim(const DagSpec& dag);

}  // namespace relscm::internal

#endif  // RELSCM_SRC_ROW_KERNEL_H_
