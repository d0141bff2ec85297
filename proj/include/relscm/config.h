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

#ifndef RELSCM_CONFIG_H_
#define RELSCM_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "relscm/graph.h"
#include "relscm/presampler.h"
#include "relscm/relational.h"
#include "relscm/scm.h"
#include "json.hpp"

namespace relscm {

// Everything a generation run depends on. Defaults are the reference
// profile: n = 2, 1000 pre-samples, 10% of node draws noisy with std 0.1,
// category counts ~ Normal(4, 2), coupling categories ~ Normal(100, 50),
// 100000 main rows and 500 additional rows.
struct GenerationConfig {
  uint64_t master_seed = 0;
  GraphParams main_graph;
  GraphParams add_graph;
  NodeConfigParams nodes;
  CouplingParams coupling;
  NoiseConfig noise;
  PrerunParams prerun;
  size_t rows_main = 100000;
  size_t rows_add = 500;
  size_t latent_count = 2;
  std::string output_dir = "out";

  // Throws kInvalidConfig naming the offending key.
  void Validate() const;

  bool operator==(const GenerationConfig&) const = default;
};

nlohmann::ordered_json ConfigToJson(const GenerationConfig& cfg);

// Missing keys take their defaults; unknown keys and invariant violations
// throw kInvalidConfig with the key path (e.g. "noise.std").
GenerationConfig ConfigFromJson(const nlohmann::json& j);

// Reads a JSON config file. An empty file yields the default profile.
GenerationConfig LoadConfig(const std::filesystem::path& path);

}  // namespace relscm

#endif  // RELSCM_CONFIG_H_
