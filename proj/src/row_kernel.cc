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

#include "row_kernel.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "relscm/error.h"

namespace relscm::internal {

size_t HiddenDim(const DagSpec& dag) {
  for (const NodeSpec& node : dag.nodes()) {
    if (node.propagation) return node.propagation->out_dim;
  }
  return 1;
}

void EvaluateRow(const DagSpec& dag, size_t n,
                 const std::vector<QuantilePair>* quantiles,
                 const NoiseConfig* noise, Rng& rng, std::span<double> values,
                 std::vector<double>& scratch) {
  std::optional<bool> row_mask;
  if (noise && noise->granularity == NoiseGranularity::kPerSample) {
    row_mask = UniformUnit(rng) < noise->affected_fraction;
  }
  for (NodeIndex i = 0; i < dag.size(); ++i) {
    const NodeSpec& node = dag.node(i);
    std::span<double> out = values.subspan(i * n, n);
    if (dag.IsRoot(i)) {
      if (!node.root_dist) {
        throw Error(ErrorCode::kContractViolation,
                    "root node " + node.name + " has no distribution");
      }
      SampleRootInto(*node.root_dist, rng, out);
    } else {
      const PropagationFn& f = *node.propagation;
      const auto& parents = dag.parents(i);
      if (f.out_dim != n || f.in_dim != parents.size() * n) {
        throw Error(ErrorCode::kContractViolation,
                    "node " + node.name + " weights do not match its " +
                        std::to_string(parents.size()) + " parents");
      }
      scratch.resize(f.in_dim + n);
      for (size_t p = 0; p < parents.size(); ++p) {
        const double* src = values.data() + parents[p] * n;
        std::copy(src, src + n, scratch.begin() + p * n);
      }
      PropagateInto(std::span<const double>(scratch.data(), f.in_dim), f, out);
      if (quantiles && noise) {
        std::span<double> eps(scratch.data() + f.in_dim, n);
        SampleNoiseInto(*noise, row_mask, rng, eps);
        AddScaledNoise((*quantiles)[i], eps, out);
      }
    }
    for (double v : out) {
      if (!std::isfinite(v)) {
        std::string what = node.propagation
                               ? std::string(ActivationName(node.propagation->activation))
                               : std::string("root sample");
        throw Error(ErrorCode::kNumerical,
                    "node " + node.name + " (" + what +
                        ") produced a non-finite value");
      }
    }
  }
}

}  // namespace relscm::internal
