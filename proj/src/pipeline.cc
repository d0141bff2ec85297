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

#include "relscm/pipeline.h"

#include <sstream>

#include "relscm/error.h"
#include "relscm/io.h"
#include "relscm/sampler.h"

namespace relscm {
namespace {

constexpr char kMainCsv[] = "main.csv";
constexpr char kAddCsv[] = "additional.csv";
constexpr char kSchemaJson[] = "schema.json";
constexpr char kSchemaDot[] = "schema.dot";
constexpr char kManifest[] = "manifest.json";

Json SubseedRecords() {
  Json tags = Json::array();
  auto add = [&](std::string_view tag, const char* index, const char* use) {
    tags.push_back({{"run_tag", tag}, {"index", index}, {"use", use}});
  };
  add(tags::kGraphMain, "attempt", "main graph node count and BA structure");
  add(tags::kGraphAdditional, "attempt", "additional graph node count and BA structure");
  add(tags::kConfigsMain, "0", "main graph node configs and weights");
  add(tags::kConfigsAdditional, "0", "additional graph node configs and weights");
  add(tags::kCompose, "0", "coupling node, latent edges, re-initialized weights");
  add(tags::kPrerun, "row", "noiseless pre-run rows");
  add(tags::kKMeans, "merged node index", "k-means++ seeding");
  add(tags::kMainRun, "row", "merged-graph main run rows");
  add(tags::kAdditionalRun, "row", "additional-graph main run rows");
  return Json{
      {"derivation",
       "seed = le64(SHA-256(le64(master_seed) || run_tag || 0x00 || "
       "le64(index))[0..8)); engine mt19937_64"},
      {"streams", std::move(tags)}};
}

Table HeaderTable(const DagSpec& roles, const std::vector<NodeIndex>& nodes,
                  const PrerunStats& stats) {
  std::vector<Column> cols;
  for (NodeIndex i : nodes) cols.push_back(MakeColumnHeader(roles, i, stats));
  return Table(std::move(cols), 0);
}

}  // namespace

GeneratedDataset Generate(const GenerationConfig& cfg, Execution exec) {
  cfg.Validate();
  const uint64_t seed = cfg.master_seed;
  DagSpec main = SampleDag(cfg.main_graph, seed, tags::kGraphMain, "M");
  {
    Rng rng = MakeStream(seed, tags::kConfigsMain, 0);
    AssignNodeConfigs(main, cfg.nodes, rng);
  }
  DagSpec add = SampleDag(cfg.add_graph, seed, tags::kGraphAdditional, "A");
  {
    Rng rng = MakeStream(seed, tags::kConfigsAdditional, 0);
    AssignNodeConfigs(add, cfg.nodes, rng);
  }
  Rng compose_rng = MakeStream(seed, tags::kCompose, 0);
  GeneratedDataset out;
  out.schema = Compose(main, add, cfg.latent_count, cfg.coupling, cfg.nodes,
                       compose_rng);
  RelationalRunParams run;
  run.rows_main = cfg.rows_main;
  run.rows_add = cfg.rows_add;
  run.noise = cfg.noise;
  run.prerun = cfg.prerun;
  out.data = GenerateRelational(out.schema, run, seed, exec);
  out.fingerprint = out.data.main_table.provenance.schema_fingerprint;
  return out;
}

std::map<std::string, std::string> WriteDataset(
    const GenerationConfig& cfg, const GeneratedDataset& ds,
    const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::map<std::string, std::string> hashes;
  auto write = [&](const char* name, const std::string& contents) {
    WriteFile(out_dir / name, contents);
    hashes[name] = Sha256Hex(contents);
  };

  write(kMainCsv, TableToCsv(ds.data.main_table));
  write(kAddCsv, TableToCsv(ds.data.add_table));
  Json schema;
  schema["format_version"] = 1;
  schema["master_seed"] = cfg.master_seed;
  schema["fingerprint"] = ds.fingerprint;
  schema["schema"] = SchemaToJson(ds.schema);
  schema["prerun_stats"] = StatsToJson(ds.data.stats);
  schema["conventions"] = {
      {"quantiles", "linear interpolation, h = p (m - 1)"},
      {"variance_pooling", "population (divide by n)"},
      {"median_pooling", "mean of the middle pair for even n"},
      {"categorical_ids", "0-based nearest centroid, ties to lowest index"},
      {"weights", "Normal(0, 1 / fan_in); re-drawn when composition grows "
                  "a node's parent set"},
      {"noise", "added to non-root nodes only"}};
  write(kSchemaJson, schema.dump(1) + "\n");
  write(kSchemaDot, SchemaToDot(ds.schema));

  Json files = Json::object();
  for (const auto& [name, hash] : hashes) files[name] = hash;
  Json manifest;
  manifest["tool_version"] = kToolVersion;
  manifest["schema_fingerprint"] = ds.fingerprint;
  manifest["config"] = ConfigToJson(cfg);
  manifest["files"] = std::move(files);
  manifest["subseeds"] = SubseedRecords();
  manifest["rows"] = {{"main", ds.data.main_table.row_count()},
                      {"additional", ds.data.add_table.row_count()}};
  write(kManifest, manifest.dump(1) + "\n");
  return hashes;
}

std::map<std::string, std::string> CmdGenerate(
    const GenerationConfig& cfg, const std::filesystem::path& out_dir) {
  return WriteDataset(cfg, Generate(cfg), out_dir);
}

LoadedDataset LoadDataset(const std::filesystem::path& dir) {
  const nlohmann::json j = nlohmann::json::parse(ReadFile(dir / kSchemaJson));
  LoadedDataset out;
  out.schema = SchemaFromJson(j.at("schema"));
  out.data.stats = StatsFromJson(j.at("prerun_stats"));
  out.fingerprint = SchemaFingerprint(out.schema, out.data.stats);
  if (j.at("fingerprint").get<std::string>() != out.fingerprint) {
    throw Error(ErrorCode::kIo, "schema.json content does not match its fingerprint");
  }
  if (std::filesystem::exists(dir / kManifest)) {
    const nlohmann::json m = nlohmann::json::parse(ReadFile(dir / kManifest));
    if (m.at("schema_fingerprint").get<std::string>() != out.fingerprint) {
      throw Error(ErrorCode::kIo, "manifest fingerprint does not match schema.json");
    }
  }
  ValidateSchema(out.schema);
  const uint64_t seed = j.at("master_seed").get<uint64_t>();

  const RelationalSchema& s = out.schema;
  std::vector<NodeIndex> main_nodes;
  for (NodeIndex i = s.main_offset(); i < s.merged.size(); ++i) main_nodes.push_back(i);
  main_nodes.push_back(s.coupling);
  Table main_like = HeaderTable(s.merged, main_nodes, out.data.stats);

  const DagSpec add_dag = PrefixSubgraph(s.merged, s.coupling + 1);
  std::vector<NodeIndex> add_nodes;
  for (NodeIndex i = 0; i <= s.coupling; ++i) add_nodes.push_back(i);
  Table add_like = HeaderTable(add_dag, add_nodes, out.data.stats);

  out.data.main_table = ReadCsv(dir / kMainCsv, main_like);
  out.data.add_table = ReadCsv(dir / kAddCsv, add_like);
  for (Table* t : {&out.data.main_table, &out.data.add_table}) {
    t->provenance.schema_fingerprint = out.fingerprint;
    t->provenance.master_seed = seed;
  }
  out.data.main_table.provenance.run_tag = std::string(tags::kMainRun);
  out.data.add_table.provenance.run_tag = std::string(tags::kAdditionalRun);
  return out;
}

Json ReportToJson(const EvalReport& report) {
  Json targets = Json::array();
  for (const TargetResult& t : report.targets) {
    Json j;
    j["column"] = t.column;
    j["task"] = t.task == TaskKind::kRegression ? "regression" : "classification";
    j["metric"] = t.metric;
    j["main_only"] = t.main_only ? Json(*t.main_only) : Json(nullptr);
    j["joined"] = t.joined ? Json(*t.joined) : Json(nullptr);
    j["latently_affected"] = t.latently_affected;
    if (!t.note.empty()) j["note"] = t.note;
    targets.push_back(std::move(j));
  }
  Json out;
  out["schema_fingerprint"] = report.schema_fingerprint;
  out["seed"] = report.seed;
  out["k"] = report.k;
  out["train_rows"] = report.train_rows;
  out["test_rows"] = report.test_rows;
  out["additional_rows"] = report.add_rows;
  out["feature_representation"] =
      "standardized numeric + one-hot categorical; joined adds per-key "
      "additional-table aggregates";
  out["targets"] = std::move(targets);
  return out;
}

std::string ReportToMetricsCsv(const EvalReport& report) {
  std::ostringstream out;
  out << "target,task,metric,condition,value,latently_affected\n";
  for (const TargetResult& t : report.targets) {
    const char* task = t.task == TaskKind::kRegression ? "regression" : "classification";
    for (const auto& [cond, value] :
         {std::pair{"main_only", t.main_only}, std::pair{"joined", t.joined}}) {
      out << t.column << ',' << task << ',' << t.metric << ',' << cond << ','
          << (value ? FormatDouble(*value) : "") << ','
          << (t.latently_affected ? "true" : "false") << '\n';
    }
  }
  return out.str();
}

EvalReport CmdEval(const std::filesystem::path& dataset_dir,
                   const EvalParams& params,
                   const std::filesystem::path& out_dir) {
  const LoadedDataset ds = LoadDataset(dataset_dir);
  const EvalReport report = RunComparison(ds.data, ds.schema, params);
  std::filesystem::create_directories(out_dir);
  WriteFile(out_dir / "eval_report.json", ReportToJson(report).dump(1) + "\n");
  WriteFile(out_dir / "metrics.csv", ReportToMetricsCsv(report));
  return report;
}

std::map<std::string, std::string> CmdRegenerate(
    const std::filesystem::path& manifest_path,
    const std::filesystem::path& out_dir) {
  const nlohmann::json manifest = nlohmann::json::parse(ReadFile(manifest_path));
  const GenerationConfig cfg = ConfigFromJson(manifest.at("config"));
  const auto hashes = WriteDataset(cfg, Generate(cfg), out_dir);
  for (const auto& item : manifest.at("files").items()) {
    auto it = hashes.find(item.key());
    if (it == hashes.end() || it->second != item.value().get<std::string>()) {
      throw Error(ErrorCode::kIo, "regenerated " + item.key() +
                                      " does not match the manifest hash");
    }
  }
  return hashes;
}

}  // namespace relscm
