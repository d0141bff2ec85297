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

#include "relscm/graph.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <string>

#include "relscm/error.h"

namespace relscm {

std::string_view NodeRoleName(NodeRole role) {
  switch (role) {
    case NodeRole::kRoot: return "root";
    case NodeRole::kFeature: return "feature";
    case NodeRole::kTarget: return "target";
  }
  return "feature";
}

std::optional<NodeRole> ParseNodeRole(std::string_view name) {
  for (NodeRole r : {NodeRole::kRoot, NodeRole::kFeature, NodeRole::kTarget}) {
    if (NodeRoleName(r) == name) return r;
  }
  return std::nullopt;
}

std::string_view PoolingKindName(PoolingKind kind) {
  switch (kind) {
    case PoolingKind::kNorm: return "norm";
    case PoolingKind::kMean: return "mean";
    case PoolingKind::kMedian: return "median";
    case PoolingKind::kVariance: return "variance";
    case PoolingKind::kCategorical: return "categorical";
  }
  return "mean";
}

std::optional<PoolingKind> ParsePoolingKind(std::string_view name) {
  for (PoolingKind k : {PoolingKind::kNorm, PoolingKind::kMean,
                        PoolingKind::kMedian, PoolingKind::kVariance,
                        PoolingKind::kCategorical}) {
    if (PoolingKindName(k) == name) return k;
  }
  return std::nullopt;
}

DagSpec::DagSpec(size_t num_nodes, const std::set<Edge>& edges,
                 std::string_view prefix)
    : nodes_(num_nodes) {
  for (size_t i = 0; i < num_nodes; ++i) {
    nodes_[i].index = i;
    nodes_[i].name = std::string(prefix) + std::to_string(i);
  }
  for (const Edge& e : edges) {
    if (e.first >= e.second || e.second >= num_nodes) {
      throw Error(ErrorCode::kContractViolation,
                  "edge (" + std::to_string(e.first) + ", " +
                      std::to_string(e.second) +
                      ") is not increasing or out of range");
    }
  }
  edges_ = edges;
  Rebuild();
}

void DagSpec::Rebuild() {
  parents_.assign(nodes_.size(), {});
  children_.assign(nodes_.size(), {});
  // std::set iterates in (parent, child) order, so both lists end sorted
  // once parents are sorted per child below.
  for (const auto& [u, v] : edges_) {
    parents_[v].push_back(u);
    children_[u].push_back(v);
  }
  for (auto& p : parents_) std::sort(p.begin(), p.end());
}

void DagSpec::AddEdge(NodeIndex u, NodeIndex v) {
  if (u >= v || v >= nodes_.size()) {
    throw Error(ErrorCode::kContractViolation,
                "edge (" + std::to_string(u) + ", " + std::to_string(v) +
                    ") would break index order");
  }
  edges_.insert({u, v});
  Rebuild();
}

std::vector<NodeIndex> DagSpec::Roots() const {
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < size(); ++i)
    if (IsRoot(i)) out.push_back(i);
  return out;
}

std::vector<NodeIndex> DagSpec::Sinks() const {
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < size(); ++i)
    if (IsSink(i)) out.push_back(i);
  return out;
}

std::vector<NodeIndex> DagSpec::NonSinks() const {
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < size(); ++i)
    if (!IsSink(i)) out.push_back(i);
  return out;
}

UndirectedGraph SampleBaGraph(size_t num_nodes, size_t attach_m, Rng& rng) {
  if (num_nodes < 2 || attach_m < 1 || attach_m >= num_nodes) {
    throw Error(ErrorCode::kInvalidParameter,
                "BA graph needs num_nodes >= 2 and 1 <= attach_m < num_nodes "
                "(got num_nodes=" + std::to_string(num_nodes) +
                    ", attach_m=" + std::to_string(attach_m) + ")");
  }
  UndirectedGraph g;
  g.num_nodes = num_nodes;
  g.edges.insert({0, 1});
  std::vector<size_t> degree(num_nodes, 0);
  degree[0] = degree[1] = 1;

  for (size_t v = 2; v < num_nodes; ++v) {
    const size_t want = std::min(attach_m, v);
    std::vector<size_t> chosen;
    // Sequential weighted sampling without replacement over the current
    // degrees of nodes [0, v).
    std::vector<size_t> weight(degree.begin(), degree.begin() + v);
    for (size_t pick = 0; pick < want; ++pick) {
      size_t total = 0;
      for (size_t w : weight) total += w;
      size_t r = std::uniform_int_distribution<size_t>(0, total - 1)(rng);
      size_t u = 0;
      while (r >= weight[u]) {
        r -= weight[u];
        ++u;
      }
      chosen.push_back(u);
      weight[u] = 0;
    }
    for (size_t u : chosen) {
      g.edges.insert({u, v});
      ++degree[u];
      ++degree[v];
    }
  }
  return g;
}

DagSpec OrientAndPrune(const UndirectedGraph& g, std::string_view prefix) {
  std::vector<bool> used(g.num_nodes, false);
  for (const auto& [a, b] : g.edges) {
    if (a == b || a >= g.num_nodes || b >= g.num_nodes) {
      throw Error(ErrorCode::kInvalidInput, "malformed undirected edge");
    }
    used[a] = used[b] = true;
  }
  if (g.edges.empty()) {
    throw Error(ErrorCode::kDegenerateGraph, "graph has no edges");
  }
  std::vector<size_t> remap(g.num_nodes, 0);
  size_t kept = 0;
  for (size_t i = 0; i < g.num_nodes; ++i) {
    if (used[i]) remap[i] = kept++;
  }
  std::set<Edge> directed;
  for (const auto& [a, b] : g.edges) {
    const size_t lo = std::min(a, b), hi = std::max(a, b);
    directed.insert({remap[lo], remap[hi]});
  }
  return DagSpec(kept, directed, prefix);
}

void ClassifyNodes(DagSpec& dag) {
  for (NodeIndex i = 0; i < dag.size(); ++i) {
    NodeSpec& node = dag.mutable_node(i);
    if (dag.IsRoot(i)) {
      node.role = NodeRole::kRoot;
    } else if (dag.IsSink(i)) {
      node.role = NodeRole::kTarget;
    } else {
      node.role = NodeRole::kFeature;
    }
  }
}

int CategoryCountFromSample(double raw) {
  if (!std::isfinite(raw)) return 2;
  const double r = std::round(raw);
  if (r < 2.0) return 2;
  if (r > 1e6) return 1000000;
  return static_cast<int>(r);
}

RootDistribution SampleRootDistribution(const RootDistributionParams& p,
                                        Rng& rng) {
  const double total = p.normal_weight + p.gamma_weight + p.mixture_weight;
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                "root distribution weights must not all be zero");
  }
  const double u = UniformUnit(rng) * total;
  if (u < p.normal_weight) {
    const double mean = UniformIn(rng, p.normal_mean.first, p.normal_mean.second);
    const double sd = UniformIn(rng, p.normal_std.first, p.normal_std.second);
    return RootDistribution::Normal(mean, sd);
  }
  if (u < p.normal_weight + p.gamma_weight) {
    const double shape =
        UniformIn(rng, p.gamma_shape.first, p.gamma_shape.second);
    const double scale =
        UniformIn(rng, p.gamma_scale.first, p.gamma_scale.second);
    return RootDistribution::Gamma(shape, scale);
  }
  const double prob = UniformIn(rng, p.mixture_p.first, p.mixture_p.second);
  const double lambda =
      UniformIn(rng, p.mixture_exp_scale.first, p.mixture_exp_scale.second);
  return RootDistribution::Mixture(prob, p.mixture_normal_std, lambda);
}

void AssignNodeConfigs(DagSpec& dag, const NodeConfigParams& cfg, Rng& rng) {
  if (cfg.activations.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "activation set is empty");
  }
  if (cfg.poolings.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "pooling set is empty");
  }
  if (cfg.hidden_dim == 0) {
    throw Error(ErrorCode::kInvalidConfig, "hidden_dim must be >= 1");
  }
  std::normal_distribution<double> category_dist(cfg.category_mean,
                                                 cfg.category_std);
  for (NodeIndex i = 0; i < dag.size(); ++i) {
    NodeSpec& node = dag.mutable_node(i);
    node.root_dist.reset();
    node.propagation.reset();
    node.category_count.reset();
    Activation activation = Activation::kIdentity;
    if (dag.IsRoot(i)) {
      node.root_dist = SampleRootDistribution(cfg.roots, rng);
    } else {
      activation = cfg.activations[UniformIndex(rng, cfg.activations.size())];
    }
    if (UniformUnit(rng) < cfg.categorical_probability) {
      node.pooling.kind = PoolingKind::kCategorical;
      node.category_count = CategoryCountFromSample(category_dist(rng));
    } else {
      node.pooling.kind = cfg.poolings[UniformIndex(rng, cfg.poolings.size())];
    }
    if (!dag.IsRoot(i)) {
      node.propagation = InitPropagationFn(dag.parents(i).size(),
                                           cfg.hidden_dim, activation, rng);
    }
  }
}

DagSpec SampleDag(const GraphParams& params, uint64_t master_seed,
                  std::string_view tag, std::string_view prefix) {
  if (params.min_nodes < 2 || params.max_nodes < params.min_nodes) {
    throw Error(ErrorCode::kInvalidConfig,
                "graph node range must satisfy 2 <= min_nodes <= max_nodes");
  }
  for (int attempt = 0; attempt < kMaxStructureAttempts; ++attempt) {
    Rng rng = MakeStream(master_seed, tag, attempt);
    const size_t n =
        params.min_nodes +
        UniformIndex(rng, params.max_nodes - params.min_nodes + 1);
    UndirectedGraph g = SampleBaGraph(n, std::min(params.attach_m, n - 1), rng);
    DagSpec dag;
    try {
      dag = OrientAndPrune(g, prefix);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kDegenerateGraph) continue;
      throw;
    }
    bool sink_with_parent = false;
    for (NodeIndex s : dag.Sinks()) sink_with_parent |= !dag.IsRoot(s);
    if (dag.size() < 3 || !sink_with_parent) continue;
    ClassifyNodes(dag);
    return dag;
  }
  throw Error(ErrorCode::kDegenerateGraph,
              "no usable graph after " + std::to_string(kMaxStructureAttempts) +
                  " attempts");
}

bool IsAcyclic(const DagSpec& dag) {
  // Kahn's algorithm; does not rely on the index-order convention.
  std::vector<size_t> indegree(dag.size(), 0);
  std::vector<std::vector<NodeIndex>> out(dag.size());
  for (const auto& [u, v] : dag.edges()) {
    ++indegree[v];
    out[u].push_back(v);
  }
  std::deque<NodeIndex> ready;
  for (NodeIndex i = 0; i < dag.size(); ++i)
    if (indegree[i] == 0) ready.push_back(i);
  size_t visited = 0;
  while (!ready.empty()) {
    const NodeIndex u = ready.front();
    ready.pop_front();
    ++visited;
    for (NodeIndex v : out[u])
      if (--indegree[v] == 0) ready.push_back(v);
  }
  return visited == dag.size();
}

bool HasIsolatedNode(const DagSpec& dag) {
  for (NodeIndex i = 0; i < dag.size(); ++i) {
    if (dag.IsRoot(i) && dag.IsSink(i)) return true;
  }
  return false;
}

}  // namespace relscm
