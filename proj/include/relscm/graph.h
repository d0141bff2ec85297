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

#ifndef RELSCM_GRAPH_H_
#define RELSCM_GRAPH_H_

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "relscm/rng.h"
#include "relscm/scm.h"

namespace relscm {

using NodeIndex = size_t;
using Edge = std::pair<NodeIndex, NodeIndex>;

struct UndirectedGraph {
  size_t num_nodes = 0;
  // Stored with first < second.
  std::set<Edge> edges;

  bool operator==(const UndirectedGraph&) const = default;
};

enum class NodeRole { kRoot, kFeature, kTarget };

std::string_view NodeRoleName(NodeRole role);
std::optional<NodeRole> ParseNodeRole(std::string_view name);

enum class PoolingKind { kNorm, kMean, kMedian, kVariance, kCategorical };

std::string_view PoolingKindName(PoolingKind kind);
std::optional<PoolingKind> ParsePoolingKind(std::string_view name);

struct PoolingSpec {
  PoolingKind kind = PoolingKind::kMean;
  bool categorical() const { return kind == PoolingKind::kCategorical; }
  bool operator==(const PoolingSpec&) const = default;
};

struct NodeSpec {
  NodeIndex index = 0;
  std::string name;
  NodeRole role = NodeRole::kFeature;
  std::optional<RootDistribution> root_dist;
  // Activation and weights live together; present iff the node has parents.
  std::optional<PropagationFn> propagation;
  PoolingSpec pooling;
  std::optional<int> category_count;

  bool operator==(const NodeSpec&) const = default;
};

// A DAG whose node index order is a topological order: every edge (u, v)
// has u < v. Parent lists are kept sorted so the concatenation order of
// parent vectors is well defined.
class DagSpec {
 public:
  DagSpec() = default;
  // Builds the graph structure; node specs are default-initialized and
  // named `prefix` + index. Throws kContractViolation if an edge is not
  // strictly increasing or out of range.
  DagSpec(size_t num_nodes, const std::set<Edge>& edges,
          std::string_view prefix = "");

  size_t size() const { return nodes_.size(); }
  const std::vector<NodeSpec>& nodes() const { return nodes_; }
  std::vector<NodeSpec>& mutable_nodes() { return nodes_; }
  const NodeSpec& node(NodeIndex i) const { return nodes_[i]; }
  NodeSpec& mutable_node(NodeIndex i) { return nodes_[i]; }
  const std::set<Edge>& edges() const { return edges_; }

  const std::vector<NodeIndex>& parents(NodeIndex i) const {
    return parents_[i];
  }
  const std::vector<NodeIndex>& children(NodeIndex i) const {
    return children_[i];
  }

  bool IsRoot(NodeIndex i) const { return parents_[i].empty(); }
  bool IsSink(NodeIndex i) const { return children_[i].empty(); }

  std::vector<NodeIndex> Roots() const;
  std::vector<NodeIndex> Sinks() const;
  // Nodes with at least one child (roots included).
  std::vector<NodeIndex> NonSinks() const;

  // Adds an edge u -> v with u < v. Throws kContractViolation otherwise.
  void AddEdge(NodeIndex u, NodeIndex v);

  bool operator==(const DagSpec& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  void Rebuild();

  std::vector<NodeSpec> nodes_;
  std::set<Edge> edges_;
  std::vector<std::vector<NodeIndex>> parents_;
  std::vector<std::vector<NodeIndex>> children_;
};

struct GraphParams {
  size_t min_nodes = 6;
  size_t max_nodes = 12;
  size_t attach_m = 2;

  bool operator==(const GraphParams&) const = default;
};

// Root-distribution family weights and the ranges their parameters are
// drawn from (uniformly).
struct RootDistributionParams {
  double normal_weight = 1.0;
  double gamma_weight = 1.0;
  double mixture_weight = 1.0;
  std::pair<double, double> normal_mean{-1.0, 1.0};
  std::pair<double, double> normal_std{0.5, 1.5};
  std::pair<double, double> gamma_shape{1.0, 3.0};
  std::pair<double, double> gamma_scale{0.5, 2.0};
  std::pair<double, double> mixture_p{0.5, 0.5};
  double mixture_normal_std = 1.0;
  std::pair<double, double> mixture_exp_scale{0.3, 1.0};

  bool operator==(const RootDistributionParams&) const = default;
};

// The part of the generation config that annotates nodes.
struct NodeConfigParams {
  size_t hidden_dim = 2;
  RootDistributionParams roots;
  std::vector<Activation> activations{Activation::kIdentity, Activation::kRelu,
                                      Activation::kTanh, Activation::kLogAbs,
                                      Activation::kSin};
  // Continuous pooling kinds; categorical pooling is chosen separately with
  // probability categorical_probability.
  std::vector<PoolingKind> poolings{PoolingKind::kNorm, PoolingKind::kMean,
                                    PoolingKind::kMedian,
                                    PoolingKind::kVariance};
  double categorical_probability = 0.4;
  double category_mean = 4.0;
  double category_std = 2.0;

  bool operator==(const NodeConfigParams&) const = default;
};

// Barabasi-Albert graph grown from the connected seed pair {0, 1}. Each
// later node attaches to min(attach_m, existing) distinct earlier nodes
// drawn with probability proportional to their current degree.
UndirectedGraph SampleBaGraph(size_t num_nodes, size_t attach_m, Rng& rng);

// Orients every edge from the lower to the higher index, drops isolated
// nodes and re-indexes the remainder preserving order. Throws
// kDegenerateGraph when no edge remains. Roles are left unassigned.
DagSpec OrientAndPrune(const UndirectedGraph& g, std::string_view prefix = "");

// Roots have in-degree 0, targets out-degree 0, everything else is a
// feature. For readout purposes roots count as features too.
void ClassifyNodes(DagSpec& dag);

// round(raw) clamped to at least 2.
int CategoryCountFromSample(double raw);

// Draws root distributions, activations (with weights), pooling kinds and
// category counts. Throws kInvalidConfig on empty activation or pooling
// sets.
void AssignNodeConfigs(DagSpec& dag, const NodeConfigParams& cfg, Rng& rng);

RootDistribution SampleRootDistribution(const RootDistributionParams& params,
                                        Rng& rng);

// Full structure sampling with the resample policy: draws a node count in
// [min_nodes, max_nodes], samples a BA graph, orients, prunes and
// classifies. Attempts that yield fewer than 3 nodes or no sink with a
// parent are retried on the next sub-seed (tag, attempt), at most
// kMaxStructureAttempts times.
inline constexpr int kMaxStructureAttempts = 16;
DagSpec SampleDag(const GraphParams& params, uint64_t master_seed,
                  std::string_view tag, std::string_view prefix);

// Structural checks used by tests and the composer.
bool IsAcyclic(const DagSpec& dag);
bool HasIsolatedNode(const DagSpec& dag);

}  // namespace relscm

#endif  // RELSCM_GRAPH_H_
