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

#ifndef RELSCM_IO_H_
#define RELSCM_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "relscm/graph.h"
#include "relscm/presampler.h"
#include "relscm/relational.h"
#include "relscm/table.h"

namespace relscm {

using Json = nlohmann::ordered_json;

std::string Sha256Hex(std::string_view data);
std::string Sha256File(const std::filesystem::path& path);

Json DagToJson(const DagSpec& dag);
DagSpec DagFromJson(const nlohmann::json& j);

Json StatsToJson(const PrerunStats& stats);
PrerunStats StatsFromJson(const nlohmann::json& j);

Json SchemaToJson(const RelationalSchema& schema);
RelationalSchema SchemaFromJson(const nlohmann::json& j);

// Content hash over the serialized schema and pre-run statistics.
std::string SchemaFingerprint(const RelationalSchema& schema,
                              const PrerunStats& stats);

// Graphviz rendering: targets green, features blue, C as a box, latent
// edges yellow. Edges carry the child's activation as label.
std::string DagToDot(const DagSpec& dag, std::string_view graph_name = "scm");
std::string SchemaToDot(const RelationalSchema& schema);

// Shortest round-trip decimal form of a double.
std::string FormatDouble(double v);

// Header row plus one line per row; categorical values as integers.
std::string TableToCsv(const Table& table);
void WriteCsv(const Table& table, const std::filesystem::path& path);

// Parses a CSV written by TableToCsv. Column kinds, roles and category
// counts are taken from `like`, whose column names must match the header.
Table ReadCsv(const std::filesystem::path& path, const Table& like);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

}  // namespace relscm

#endif  // RELSCM_IO_H_
