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

#ifndef RELSCM_PIPELINE_H_
#define RELSCM_PIPELINE_H_

#include <filesystem>
#include <map>
#include <string>

#include "relscm/config.h"
#include "relscm/io.h"
#include "relscm/eval.h"
#include "relscm/relational.h"

namespace relscm {

inline constexpr char kToolVersion[] = "relscm 1.0.0";

// Structure sampling, composition and both main runs for one config.
struct GeneratedDataset {
  RelationalSchema schema;
  RelationalDataset data;
  std::string fingerprint;
};

GeneratedDataset Generate(const GenerationConfig& cfg,
                          Execution exec = Execution::kParallel);

// Writes main.csv, additional.csv, schema.json, schema.dot and
// manifest.json into `out_dir`. Returns file name -> SHA-256.
std::map<std::string, std::string> WriteDataset(
    const GenerationConfig& cfg, const GeneratedDataset& dataset,
    const std::filesystem::path& out_dir);

std::map<std::string, std::string> CmdGenerate(const GenerationConfig& cfg,
                                               const std::filesystem::path& out_dir);

// Loads schema.json and both CSVs from a dataset directory, checking the
// manifest fingerprint when one is present.
struct LoadedDataset {
  RelationalSchema schema;
  RelationalDataset data;
  std::string fingerprint;
};
LoadedDataset LoadDataset(const std::filesystem::path& dir);

// Writes eval_report.json and metrics.csv into `out_dir`.
EvalReport CmdEval(const std::filesystem::path& dataset_dir,
                   const EvalParams& params,
                   const std::filesystem::path& out_dir);

Json ReportToJson(const EvalReport& report);
std::string ReportToMetricsCsv(const EvalReport& report);

// Regenerates from a manifest into `out_dir` and compares content hashes
// with the manifest. Throws kIo on any mismatch.
std::map<std::string, std::string> CmdRegenerate(
    const std::filesystem::path& manifest_path,
    const std::filesystem::path& out_dir);

}  // namespace relscm

#endif  // RELSCM_PIPELINE_H_
