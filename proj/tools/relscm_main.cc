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

// Command-line front end: generate, eval, regenerate, export-dot.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "relscm/config.h"
#include "relscm/error.h"
#include "relscm/io.h"
#include "relscm/parallel.h"
#include "relscm/pipeline.h"

namespace {

void PrintHashes(const std::map<std::string, std::string>& hashes) {
  for (const auto& [name, hash] : hashes) std::cout << hash << "  " << name << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic relational tabular data from structural causal models"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");

  // generate
  auto* gen = app.add_subcommand("generate", "Sample a relational dataset");
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string out_dir;
  std::optional<size_t> rows_main, rows_add;
  gen->add_option("--config", config_path, "JSON config (defaults if omitted)");
  gen->add_option("--seed", seed, "Master seed (overrides config)");
  gen->add_option("--out", out_dir, "Output directory (overrides config)");
  gen->add_option("--rows-main", rows_main, "Main table rows (overrides config)");
  gen->add_option("--rows-add", rows_add, "Additional table rows (overrides config)");
  gen->add_option("--threads", threads, "OpenMP threads");

  // eval
  auto* ev = app.add_subcommand("eval", "Main-only vs joined kNN comparison");
  std::string data_dir, eval_out;
  relscm::EvalParams eval_params;
  ev->add_option("--data", data_dir, "Dataset directory")->required();
  ev->add_option("--out", eval_out, "Report directory (defaults to --data)");
  ev->add_option("--k", eval_params.knn.k, "Neighbors")->capture_default_str();
  ev->add_option("--test-fraction", eval_params.test_fraction,
                 "Tail fraction held out")->capture_default_str();
  ev->add_option("--seed", eval_params.seed, "Recorded evaluation seed");
  ev->add_option("--threads", threads, "OpenMP threads");

  // regenerate
  auto* regen = app.add_subcommand("regenerate", "Rebuild a dataset from its manifest");
  std::string manifest_path, regen_out;
  regen->add_option("--manifest", manifest_path, "manifest.json")->required();
  regen->add_option("--out", regen_out, "Output directory")->required();
  regen->add_option("--threads", threads, "OpenMP threads");

  // export-dot
  auto* dot = app.add_subcommand("export-dot", "Render schema.json as Graphviz");
  std::string schema_path, dot_out;
  dot->add_option("--schema", schema_path, "schema.json")->required();
  dot->add_option("--out", dot_out, "Output .dot file (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);
  relscm::SetNumThreads(threads);

  try {
    if (*gen) {
      relscm::GenerationConfig cfg;
      if (!config_path.empty()) cfg = relscm::LoadConfig(config_path);
      if (seed) cfg.master_seed = *seed;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (rows_main) cfg.rows_main = *rows_main;
      if (rows_add) cfg.rows_add = *rows_add;
      cfg.Validate();
      PrintHashes(relscm::CmdGenerate(cfg, cfg.output_dir));
    } else if (*ev) {
      const auto report = relscm::CmdEval(
          data_dir, eval_params, eval_out.empty() ? data_dir : eval_out);
      std::cout << relscm::ReportToMetricsCsv(report);
    } else if (*regen) {
      PrintHashes(relscm::CmdRegenerate(manifest_path, regen_out));
      std::cout << "all content hashes match the manifest\n";
    } else if (*dot) {
      const auto j = nlohmann::json::parse(relscm::ReadFile(schema_path));
      const std::string text =
          relscm::SchemaToDot(relscm::SchemaFromJson(j.at("schema")));
      if (dot_out.empty()) {
        std::cout << text;
      } else {
        relscm::WriteFile(dot_out, text);
      }
    }
  } catch (const relscm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return EXIT_FAILURE;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
