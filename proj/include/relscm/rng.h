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

#ifndef RELSCM_RNG_H_
#define RELSCM_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace relscm {

// Every random decision draws from a stream of this type. The engine output
// is fully specified by the standard; the distributions layered on top come
// from the standard library, so regenerated data is bit-identical for a
// given seed and toolchain.
using Rng = std::mt19937_64;

// Derives a 64-bit sub-seed from (master_seed, run_tag, index):
//
//   digest = SHA-256( le64(master_seed) || run_tag || 0x00 || le64(index) )
//   seed   = le64(digest[0..8))
//
// The 0x00 separator keeps tags unambiguous. This is the only place seeds
// are mixed, so another implementation reproduces every stream from it.
uint64_t DeriveSubseed(uint64_t master_seed, std::string_view run_tag,
                       uint64_t index);

inline Rng MakeStream(uint64_t master_seed, std::string_view run_tag,
                      uint64_t index) {
  return Rng(DeriveSubseed(master_seed, run_tag, index));
}

// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi]; returns lo when the range is degenerate.
inline double UniformIn(Rng& rng, double lo, double hi) {
  if (!(hi > lo)) return lo;
  return lo + (hi - lo) * UniformUnit(rng);
}

// Uniform index in [0, n). n must be positive.
inline size_t UniformIndex(Rng& rng, size_t n) {
  return std::uniform_int_distribution<size_t>(0, n - 1)(rng);
}

// Run tags used by the generation pipeline.
namespace tags {
inline constexpr std::string_view kGraphMain = "graph/main";
inline constexpr std::string_view kGraphAdditional = "graph/additional";
inline constexpr std::string_view kConfigsMain = "configs/main";
inline constexpr std::string_view kConfigsAdditional = "configs/additional";
inline constexpr std::string_view kCompose = "compose";
inline constexpr std::string_view kPrerun = "prerun";
inline constexpr std::string_view kKMeans = "kmeans";
inline constexpr std::string_view kMainRun = "main";
inline constexpr std::string_view kAdditionalRun = "additional";
}  // namespace tags

}  // namespace relscm

#endif  // RELSCM_RNG_H_
