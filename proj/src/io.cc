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

#include "relscm/io.h"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "relscm/error.h"
#include "relscm/sampler.h"

namespace relscm {
namespace {

std::string ToHex(const unsigned char* data, size_t len) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (size_t i = 0; i < len; ++i) {
    out.push_back(kDigits[data[i] >> 4]);
    out.push_back(kDigits[data[i] & 0xf]);
  }
  return out;
}

[[noreturn]] void BadJson(const std::string& what) {
  throw Error(ErrorCode::kInvalidInput, what);
}

template <typename T>
T Get(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) BadJson(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    BadJson(std::string("bad value for '") + key + "': " + e.what());
  }
}

Json RootToJson(const RootDistribution& d) {
  Json j;
  j["kind"] = RootKindName(d.kind);
  switch (d.kind) {
    case RootDistribution::Kind::kNormal:
      j["mean"] = d.mean;
      j["std"] = d.stddev;
      break;
    case RootDistribution::Kind::kGamma:
      j["shape"] = d.shape;
      j["scale"] = d.scale;
      break;
    case RootDistribution::Kind::kMixture:
      j["p"] = d.p;
      j["normal_std"] = d.normal_std;
      j["exp_scale"] = d.exp_scale;
      break;
  }
  return j;
}

RootDistribution RootFromJson(const nlohmann::json& j) {
  const auto kind = ParseRootKind(Get<std::string>(j, "kind"));
  if (!kind) BadJson("unknown root distribution kind");
  switch (*kind) {
    case RootDistribution::Kind::kNormal:
      return RootDistribution::Normal(Get<double>(j, "mean"),
                                      Get<double>(j, "std"));
    case RootDistribution::Kind::kGamma:
      return RootDistribution::Gamma(Get<double>(j, "shape"),
                                     Get<double>(j, "scale"));
    case RootDistribution::Kind::kMixture:
      return RootDistribution::Mixture(Get<double>(j, "p"),
                                       Get<double>(j, "normal_std"),
                                       Get<double>(j, "exp_scale"));
  }
  BadJson("unknown root distribution kind");
}

Json EdgesToJson(const std::set<Edge>& edges) {
  Json out = Json::array();
  for (const auto& [u, v] : edges) out.push_back({u, v});
  return out;
}

std::set<Edge> EdgesFromJson(const nlohmann::json& j) {
  std::set<Edge> out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) BadJson("edge must be a pair");
    out.insert({e[0].get<size_t>(), e[1].get<size_t>()});
  }
  return out;
}

Json VectorToJson(const NodeVector& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

}  // namespace

std::string Sha256Hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(),
             nullptr);
  return ToHex(digest.data(), len);
}

std::string Sha256File(const std::filesystem::path& path) {
  return Sha256Hex(ReadFile(path));
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

Json DagToJson(const DagSpec& dag) {
  Json nodes = Json::array();
  for (NodeIndex i = 0; i < dag.size(); ++i) {
    const NodeSpec& node = dag.node(i);
    Json j;
    j["index"] = i;
    j["name"] = node.name;
    j["role"] = NodeRoleName(node.role);
    j["pooling"] = PoolingKindName(node.pooling.kind);
    if (node.category_count) j["category_count"] = *node.category_count;
    if (node.root_dist) j["root_distribution"] = RootToJson(*node.root_dist);
    if (node.propagation) {
      const PropagationFn& f = *node.propagation;
      j["activation"] = ActivationName(f.activation);
      j["weights"] = {{"rows", f.out_dim},
                      {"cols", f.in_dim},
                      {"values", VectorToJson(f.weights)}};
    }
    nodes.push_back(std::move(j));
  }
  Json out;
  out["nodes"] = std::move(nodes);
  out["edges"] = EdgesToJson(dag.edges());
  return out;
}

DagSpec DagFromJson(const nlohmann::json& j) {
  const auto& nodes = j.at("nodes");
  DagSpec dag(nodes.size(), EdgesFromJson(j.at("edges")));
  for (size_t i = 0; i < nodes.size(); ++i) {
    const auto& nj = nodes[i];
    NodeSpec& node = dag.mutable_node(i);
    node.index = i;
    node.name = Get<std::string>(nj, "name");
    const auto role = ParseNodeRole(Get<std::string>(nj, "role"));
    const auto pooling = ParsePoolingKind(Get<std::string>(nj, "pooling"));
    if (!role || !pooling) BadJson("bad role or pooling for node " + node.name);
    node.role = *role;
    node.pooling.kind = *pooling;
    if (nj.contains("category_count"))
      node.category_count = Get<int>(nj, "category_count");
    if (nj.contains("root_distribution"))
      node.root_dist = RootFromJson(nj.at("root_distribution"));
    if (nj.contains("weights")) {
      const auto activation = ParseActivation(Get<std::string>(nj, "activation"));
      if (!activation) BadJson("bad activation for node " + node.name);
      PropagationFn f;
      const auto& w = nj.at("weights");
      f.out_dim = Get<size_t>(w, "rows");
      f.in_dim = Get<size_t>(w, "cols");
      f.weights = Get<std::vector<double>>(w, "values");
      f.activation = *activation;
      if (f.weights.size() != f.out_dim * f.in_dim)
        BadJson("weight matrix size mismatch for node " + node.name);
      node.propagation = std::move(f);
    }
  }
  return dag;
}

Json StatsToJson(const PrerunStats& stats) {
  Json out;
  out["num_presamples"] = stats.num_presamples;
  out["quantile_lo"] = stats.quantile_lo;
  out["quantile_hi"] = stats.quantile_hi;
  out["quantile_convention"] = "linear interpolation, h = p (m - 1)";
  Json q = Json::array();
  for (const QuantilePair& p : stats.quantiles)
    q.push_back({{"lo", VectorToJson(p.lo)}, {"hi", VectorToJson(p.hi)}});
  out["quantiles"] = std::move(q);
  Json cbs = Json::array();
  for (const auto& [node, cb] : stats.codebooks) {
    Json c = Json::array();
    for (const NodeVector& v : cb.centroids) c.push_back(VectorToJson(v));
    cbs.push_back({{"node", node},
                   {"fitted_on", cb.fitted_on},
                   {"centroids", std::move(c)}});
  }
  out["codebooks"] = std::move(cbs);
  out["warnings"] = stats.warnings;
  return out;
}

PrerunStats StatsFromJson(const nlohmann::json& j) {
  PrerunStats stats;
  stats.num_presamples = Get<size_t>(j, "num_presamples");
  stats.quantile_lo = Get<double>(j, "quantile_lo");
  stats.quantile_hi = Get<double>(j, "quantile_hi");
  for (const auto& q : j.at("quantiles")) {
    stats.quantiles.push_back({Get<NodeVector>(q, "lo"), Get<NodeVector>(q, "hi")});
  }
  for (const auto& c : j.at("codebooks")) {
    Codebook cb;
    cb.fitted_on = Get<size_t>(c, "fitted_on");
    cb.centroids = Get<std::vector<NodeVector>>(c, "centroids");
    stats.codebooks.emplace(Get<size_t>(c, "node"), std::move(cb));
  }
  stats.warnings = Get<std::vector<std::string>>(j, "warnings");
  return stats;
}

Json SchemaToJson(const RelationalSchema& s) {
  Json out;
  out["coupling"] = s.coupling;
  out["coupling_parent"] = s.coupling_parent;
  out["coupling_child"] = s.coupling_child;
  out["latent_edges"] = EdgesToJson(s.latent_edges);
  out["main"] = DagToJson(s.main);
  out["additional"] = DagToJson(s.additional);
  out["merged"] = DagToJson(s.merged);
  return out;
}

RelationalSchema SchemaFromJson(const nlohmann::json& j) {
  RelationalSchema s;
  s.coupling = Get<size_t>(j, "coupling");
  s.coupling_parent = Get<size_t>(j, "coupling_parent");
  s.coupling_child = Get<size_t>(j, "coupling_child");
  s.latent_edges = EdgesFromJson(j.at("latent_edges"));
  s.main = DagFromJson(j.at("main"));
  s.additional = DagFromJson(j.at("additional"));
  s.merged = DagFromJson(j.at("merged"));
  return s;
}

std::string SchemaFingerprint(const RelationalSchema& schema,
                              const PrerunStats& stats) {
  Json j;
  j["schema"] = SchemaToJson(schema);
  j["prerun_stats"] = StatsToJson(stats);
  return Sha256Hex(j.dump());
}

namespace {

std::string NodeLabel(const NodeSpec& node) {
  std::string label = node.name + "\\n" + std::string(PoolingKindName(node.pooling.kind));
  if (node.category_count) label += " K=" + std::to_string(*node.category_count);
  return label;
}

void AppendNodes(std::ostringstream& out, const DagSpec& dag,
                 std::optional<NodeIndex> coupling) {
  for (NodeIndex i = 0; i < dag.size(); ++i) {
    const NodeSpec& node = dag.node(i);
    const bool target = dag.IsSink(i);
    out << "  n" << i << " [label=\"" << NodeLabel(node) << "\"";
    if (coupling && *coupling == i) {
      out << ", shape=box, style=filled, fillcolor=\"#dddddd\"";
    } else {
      out << ", style=filled, fillcolor=\""
          << (target ? "#8fd18f" : "#8fb8e8") << "\"";
    }
    out << "];\n";
  }
}

void AppendEdge(std::ostringstream& out, const DagSpec& dag, const Edge& e,
                bool latent) {
  const auto& f = dag.node(e.second).propagation;
  out << "  n" << e.first << " -> n" << e.second << " [label=\""
      << (f ? ActivationName(f->activation) : "") << "\"";
  if (latent) out << ", color=\"#e6c200\", penwidth=2";
  out << "];\n";
}

}  // namespace

std::string DagToDot(const DagSpec& dag, std::string_view graph_name) {
  std::ostringstream out;
  out << "digraph " << graph_name << " {\n  rankdir=TB;\n";
  AppendNodes(out, dag, std::nullopt);
  for (const Edge& e : dag.edges()) AppendEdge(out, dag, e, false);
  out << "}\n";
  return out.str();
}

std::string SchemaToDot(const RelationalSchema& s) {
  std::ostringstream out;
  out << "digraph relational {\n  rankdir=TB;\n";
  AppendNodes(out, s.merged, s.coupling);
  for (const Edge& e : s.merged.edges())
    AppendEdge(out, s.merged, e, s.latent_edges.contains(e));
  out << "}\n";
  return out.str();
}

std::string FormatDouble(double v) {
  std::array<char, 32> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string TableToCsv(const Table& table) {
  std::string out;
  const auto& cols = table.columns();
  for (size_t c = 0; c < cols.size(); ++c) {
    if (c) out += ',';
    out += cols[c].name;
  }
  out += '\n';
  std::array<char, 32> buf;
  for (size_t r = 0; r < table.row_count(); ++r) {
    for (size_t c = 0; c < cols.size(); ++c) {
      if (c) out += ',';
      const double v = cols[c].values[r];
      if (cols[c].categorical()) {
        auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(),
                                       static_cast<long long>(v));
        out.append(buf.data(), ptr);
      } else {
        auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        out.append(buf.data(), ptr);
      }
    }
    out += '\n';
  }
  return out;
}

void WriteCsv(const Table& table, const std::filesystem::path& path) {
  WriteFile(path, TableToCsv(table));
}

Table ReadCsv(const std::filesystem::path& path, const Table& like) {
  const std::string text = ReadFile(path);
  std::vector<Column> cols = like.columns();
  for (Column& c : cols) c.values.clear();

  size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    line = std::string_view(text).substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    return true;
  };
  auto split = [](std::string_view line) {
    std::vector<std::string_view> fields;
    size_t start = 0;
    while (true) {
      const size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return fields;
  };

  std::string_view line;
  if (!next_line(line)) throw Error(ErrorCode::kIo, path.string() + " is empty");
  const auto header = split(line);
  if (header.size() != cols.size()) {
    throw Error(ErrorCode::kIo, path.string() + ": header has " +
                                    std::to_string(header.size()) +
                                    " columns, expected " +
                                    std::to_string(cols.size()));
  }
  for (size_t c = 0; c < cols.size(); ++c) {
    if (header[c] != cols[c].name) {
      throw Error(ErrorCode::kIo, path.string() + ": column " +
                                      std::to_string(c) + " is '" +
                                      std::string(header[c]) + "', expected '" +
                                      cols[c].name + "'");
    }
  }
  size_t rows = 0;
  while (next_line(line)) {
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != cols.size()) {
      throw Error(ErrorCode::kIo, path.string() + ": row " +
                                      std::to_string(rows + 1) +
                                      " has the wrong field count");
    }
    for (size_t c = 0; c < cols.size(); ++c) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(fields[c].data(),
                                       fields[c].data() + fields[c].size(), v);
      if (ec != std::errc() || ptr != fields[c].data() + fields[c].size()) {
        throw Error(ErrorCode::kIo, path.string() + ": bad number '" +
                                        std::string(fields[c]) + "'");
      }
      cols[c].values.push_back(v);
    }
    ++rows;
  }
  Table t(std::move(cols), rows);
  t.provenance = like.provenance;
  return t;
}

}  // namespace relscm
