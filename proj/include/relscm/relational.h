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

#ifndef RELSCM_RELATIONAL_H_
#define RELSCM_RELATIONAL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "relscm/graph.h"
#include "relscm/parallel.h"
#include "relscm/presampler.h"
#include "relscm/scm.h"
#include "relscm/table.h"

namespace relscm {

// Two DAGs merged through a coupling node C. Merged indices place every
// additional-graph node first, then C, then every main-graph node, so the
// merged index order stays topological.
struct RelationalSchema {
  DagSpec main;
  DagSpec additional;
  DagSpec merged;
  NodeIndex coupling = 0;          // merged index of C
  NodeIndex coupling_parent = 0;   // merged index of the chosen add sink
  NodeIndex coupling_child = 0;    // merged index of the chosen main feature
  std::set<Edge> latent_edges;     // merged indices, add feature -> main target

  size_t additional_offset() const { return 0; }
  size_t main_offset() const { return coupling + 1; }
  NodeIndex MergedFromMain(NodeIndex i) const { return main_offset() + i; }
  NodeIndex MergedFromAdditional(NodeIndex i) const { return i; }
  bool IsMainNode(NodeIndex merged_index) const {
    return merged_index > coupling;
  }
  bool IsAdditionalNode(NodeIndex merged_index) const {
    return merged_index < coupling;
  }

  bool operator==(const RelationalSchema&) const = default;
};

struct CouplingParams {
  double category_mean = 100.0;
  double category_std = 50.0;

  bool operator==(const CouplingParams&) const = default;
};

// Inserts C (categorical, category count from round(Normal(mean, std))
// clamped to at least 2) with a uniformly chosen additional-graph sink as
// parent and a main-graph non-sink as child, then adds latent_count
// distinct edges drawn uniformly from (additional non-sink) x (main sink).
// Nodes whose parent set grew get freshly initialized weights; a main root
// that becomes C's child is given an activation and loses its root
// distribution. Throws kInvalidConfig when latent_count exceeds the
// available pairs, kInvalidInput when a graph lacks the required nodes.
RelationalSchema Compose(const DagSpec& main, const DagSpec& additional,
                         size_t latent_count, const CouplingParams& coupling,
                         const NodeConfigParams& node_cfg, Rng& rng);

// First `count` nodes of a DAG with roles reclassified. Valid because the
// index order is topological, so a prefix is closed under parents.
DagSpec PrefixSubgraph(const DagSpec& dag, size_t count);

// Nodes reachable from `sources` without passing through `blocked`.
std::vector<bool> ReachableAvoiding(const DagSpec& dag,
                                    const std::vector<NodeIndex>& sources,
                                    std::optional<NodeIndex> blocked);

// Main-graph sinks (merged indices) reachable from an additional-graph
// feature by a path that avoids C.
std::vector<NodeIndex> LatentlyAffectedTargets(const RelationalSchema& s);

// True if every path from an additional node into the main graph passes
// through C.
bool CouplingIsOnlyCut(const RelationalSchema& s);

// Checks the structural invariants; throws kContractViolation with the
// first violated one.
void ValidateSchema(const RelationalSchema& s);

struct RelationalDataset {
  Table main_table;
  Table add_table;
  PrerunStats stats;
};

struct RelationalRunParams {
  size_t rows_main = 100000;
  size_t rows_add = 500;
  NoiseConfig noise;
  PrerunParams prerun;
};

// One pre-run over the merged graph feeds both main runs. The merged run
// is projected onto the main-graph columns plus C; the additional run
// covers the prefix graph (additional nodes plus C). `schema` is updated
// in place when the pre-run demotes or reduces categorical nodes.
RelationalDataset GenerateRelational(RelationalSchema& schema,
                                     const RelationalRunParams& params,
                                     uint64_t master_seed,
                                     Execution exec = Execution::kParallel);

}  // namespace relscm

#endif  // RELSCM_RELATIONAL_H_
