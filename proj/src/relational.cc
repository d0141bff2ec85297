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

#include "relscm/relational.h"

#include <algorithm>
#include <deque>
#include <random>
#include <string>

#include "relscm/error.h"
#include "relscm/io.h"
#include "relscm/sampler.h"

namespace relscm {

RelationalSchema Compose(const DagSpec& main, const DagSpec& additional,
                         size_t latent_count, const CouplingParams& coupling,
                         const NodeConfigParams& node_cfg, Rng& rng) {
  const std::vector<NodeIndex> add_sinks = additional.Sinks();
  const std::vector<NodeIndex> add_features = additional.NonSinks();
  const std::vector<NodeIndex> main_sinks = main.Sinks();
  const std::vector<NodeIndex> main_features = main.NonSinks();
  if (add_sinks.empty() || main_sinks.empty() || main_features.empty()) {
    throw Error(ErrorCode::kInvalidInput,
                "composition needs a sink in the additional graph and both a "
                "sink and a non-sink in the main graph");
  }
  if (latent_count > add_features.size() * main_sinks.size()) {
    throw Error(ErrorCode::kInvalidConfig,
                "latent_count " + std::to_string(latent_count) +
                    " exceeds the " +
                    std::to_string(add_features.size() * main_sinks.size()) +
                    " available (feature, target) pairs");
  }
  if (node_cfg.activations.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "activation set is empty");
  }
  const size_t n = node_cfg.hidden_dim;

  RelationalSchema s;
  s.main = main;
  s.additional = additional;
  s.coupling = additional.size();
  const size_t off = s.main_offset();

  const int c_categories = CategoryCountFromSample(
      std::normal_distribution<double>(coupling.category_mean,
                                       coupling.category_std)(rng));
  s.coupling_parent = add_sinks[UniformIndex(rng, add_sinks.size())];

  // Prefer an intermediate feature so the main root keeps its distribution.
  std::vector<NodeIndex> child_pool;
  for (NodeIndex i : main_features)
    if (!main.IsRoot(i)) child_pool.push_back(i);
  if (child_pool.empty()) child_pool = main_features;
  const NodeIndex child_local = child_pool[UniformIndex(rng, child_pool.size())];
  s.coupling_child = off + child_local;

  std::vector<Edge> pairs;
  for (NodeIndex a : add_features)
    for (NodeIndex m : main_sinks) pairs.push_back({a, off + m});
  for (size_t j = 0; j < latent_count; ++j) {
    const size_t pick = j + UniformIndex(rng, pairs.size() - j);
    std::swap(pairs[j], pairs[pick]);
    s.latent_edges.insert(pairs[j]);
  }

  std::set<Edge> edges;
  for (const Edge& e : additional.edges()) edges.insert(e);
  for (const auto& [u, v] : main.edges()) edges.insert({off + u, off + v});
  edges.insert({s.coupling_parent, s.coupling});
  edges.insert({s.coupling, s.coupling_child});
  for (const Edge& e : s.latent_edges) edges.insert(e);

  s.merged = DagSpec(off + main.size(), edges);
  std::vector<NodeSpec>& nodes = s.merged.mutable_nodes();
  for (NodeIndex i = 0; i < additional.size(); ++i) nodes[i] = additional.node(i);
  for (NodeIndex i = 0; i < main.size(); ++i) nodes[off + i] = main.node(i);
  for (NodeIndex i = 0; i < nodes.size(); ++i) nodes[i].index = i;

  NodeSpec& c = nodes[s.coupling];
  c = NodeSpec{};
  c.index = s.coupling;
  c.name = "C";
  c.pooling.kind = PoolingKind::kCategorical;
  c.category_count = c_categories;

  auto pick_activation = [&]() {
    return node_cfg.activations[UniformIndex(rng, node_cfg.activations.size())];
  };
  const Activation c_activation = pick_activation();
  c.propagation = InitPropagationFn(1, n, c_activation, rng);

  // Re-initialize every node whose parent set grew, in index order.
  std::set<NodeIndex> grown{s.coupling_child};
  for (const Edge& e : s.latent_edges) grown.insert(e.second);
  for (NodeIndex i : grown) {
    NodeSpec& node = nodes[i];
    Activation a;
    if (node.propagation) {
      a = node.propagation->activation;
    } else {
      a = pick_activation();
      node.root_dist.reset();
    }
    node.propagation =
        InitPropagationFn(s.merged.parents(i).size(), n, a, rng);
  }
  ClassifyNodes(s.merged);
  ValidateSchema(s);
  return s;
}

DagSpec PrefixSubgraph(const DagSpec& dag, size_t count) {
  std::set<Edge> edges;
  for (const Edge& e : dag.edges())
    if (e.second < count) edges.insert(e);
  DagSpec sub(count, edges);
  for (NodeIndex i = 0; i < count; ++i) sub.mutable_node(i) = dag.node(i);
  ClassifyNodes(sub);
  return sub;
}

std::vector<bool> ReachableAvoiding(const DagSpec& dag,
                                    const std::vector<NodeIndex>& sources,
                                    std::optional<NodeIndex> blocked) {
  std::vector<bool> seen(dag.size(), false);
  std::deque<NodeIndex> queue;
  for (NodeIndex s : sources) {
    if (blocked && s == *blocked) continue;
    if (!seen[s]) {
      seen[s] = true;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const NodeIndex u = queue.front();
    queue.pop_front();
    for (NodeIndex v : dag.children(u)) {
      if (seen[v] || (blocked && v == *blocked)) continue;
      seen[v] = true;
      queue.push_back(v);
    }
  }
  return seen;
}

namespace {

std::vector<NodeIndex> AdditionalNodes(const RelationalSchema& s) {
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < s.coupling; ++i) out.push_back(i);
  return out;
}

}  // namespace

std::vector<NodeIndex> LatentlyAffectedTargets(const RelationalSchema& s) {
  const std::vector<bool> reach =
      ReachableAvoiding(s.merged, AdditionalNodes(s), s.coupling);
  std::vector<NodeIndex> out;
  for (NodeIndex i = s.main_offset(); i < s.merged.size(); ++i) {
    if (s.merged.IsSink(i) && reach[i]) out.push_back(i);
  }
  return out;
}

bool CouplingIsOnlyCut(const RelationalSchema& s) {
  const std::vector<bool> reach =
      ReachableAvoiding(s.merged, AdditionalNodes(s), s.coupling);
  for (NodeIndex i = s.main_offset(); i < s.merged.size(); ++i) {
    if (reach[i]) return false;
  }
  return true;
}

void ValidateSchema(const RelationalSchema& s) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kContractViolation, what);
  };
  if (s.merged.size() != s.additional.size() + 1 + s.main.size()) {
    fail("merged graph size does not match its parts");
  }
  if (s.coupling != s.additional.size()) fail("C must follow the additional nodes");
  if (!IsAcyclic(s.merged)) fail("merged graph is cyclic");
  if (HasIsolatedNode(s.merged)) fail("merged graph has an isolated node");
  if (!s.merged.node(s.coupling).pooling.categorical()) fail("C is not categorical");
  if (s.merged.parents(s.coupling) != std::vector<NodeIndex>{s.coupling_parent}) {
    fail("C must have exactly the chosen parent");
  }
  if (!s.additional.IsSink(s.coupling_parent)) {
    fail("C's parent is not a sink of the additional graph");
  }
  if (!s.IsMainNode(s.coupling_child) ||
      s.main.IsSink(s.coupling_child - s.main_offset())) {
    fail("C's child is not a non-sink of the main graph");
  }
  for (const auto& [a, m] : s.latent_edges) {
    if (!s.IsAdditionalNode(a) || s.additional.IsSink(a)) {
      fail("latent edge does not start at an additional feature");
    }
    if (!s.IsMainNode(m) || !s.main.IsSink(m - s.main_offset())) {
      fail("latent edge does not end at a main target");
    }
  }
  for (NodeIndex i = 0; i < s.merged.size(); ++i) {
    const NodeSpec& node = s.merged.node(i);
    if (s.merged.IsRoot(i) != node.root_dist.has_value()) {
      fail("node " + node.name + " root distribution does not match its role");
    }
    if (!s.merged.IsRoot(i) &&
        (!node.propagation ||
         node.propagation->parent_count() != s.merged.parents(i).size())) {
      fail("node " + node.name + " weights do not match its parents");
    }
  }
}

RelationalDataset GenerateRelational(RelationalSchema& schema,
                                     const RelationalRunParams& params,
                                     uint64_t master_seed, Execution exec) {
  ValidateSchema(schema);
  RelationalDataset out;
  out.stats = ComputePrerunStats(schema.merged, params.prerun, master_seed, exec);
  // Mirror pre-run adjustments (demotions, reduced K) into the part graphs.
  for (NodeIndex i = 0; i < schema.additional.size(); ++i) {
    NodeSpec& node = schema.additional.mutable_node(i);
    node.pooling = schema.merged.node(i).pooling;
    node.category_count = schema.merged.node(i).category_count;
  }
  for (NodeIndex i = 0; i < schema.main.size(); ++i) {
    NodeSpec& node = schema.main.mutable_node(i);
    node.pooling = schema.merged.node(schema.MergedFromMain(i)).pooling;
    node.category_count =
        schema.merged.node(schema.MergedFromMain(i)).category_count;
  }
  const std::string fingerprint = SchemaFingerprint(schema, out.stats);

  const Table merged_table =
      GenerateTable(schema.merged, out.stats, params.rows_main, params.noise,
                    master_seed, tags::kMainRun, exec);
  std::vector<size_t> main_columns;
  for (NodeIndex i = schema.main_offset(); i < schema.merged.size(); ++i)
    main_columns.push_back(i);
  main_columns.push_back(schema.coupling);
  out.main_table = merged_table.Project(main_columns);

  const size_t prefix = schema.coupling + 1;
  const DagSpec add_dag = PrefixSubgraph(schema.merged, prefix);
  PrerunStats add_stats;
  add_stats.quantiles.assign(out.stats.quantiles.begin(),
                             out.stats.quantiles.begin() + prefix);
  for (const auto& [i, cb] : out.stats.codebooks)
    if (i < prefix) add_stats.codebooks.emplace(i, cb);
  out.add_table = GenerateTable(add_dag, add_stats, params.rows_add,
                                params.noise, master_seed,
                                tags::kAdditionalRun, exec);

  out.main_table.provenance.schema_fingerprint = fingerprint;
  out.add_table.provenance.schema_fingerprint = fingerprint;
  return out;
}

}  // namespace relscm
