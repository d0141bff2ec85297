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

#include "relscm/rng.h"

#include <openssl/sha.h>

#include <array>
#include <string>

namespace relscm {
namespace {

void AppendLe64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

uint64_t DeriveSubseed(uint64_t master_seed, std::string_view run_tag,
                       uint64_t index) {
  std::string message;
  message.reserve(17 + run_tag.size());
  AppendLe64(message, master_seed);
  message.append(run_tag);
  message.push_back('\0');
  AppendLe64(message, index);

  std::array<unsigned char, SHA256_DIGEST_LENGTH> digest;
  SHA256(reinterpret_cast<const unsigned char*>(message.data()),
         message.size(), digest.data());
  uint64_t seed = 0;
  for (int i = 7; i >= 0; --i) seed = (seed << 8) | digest[i];
  return seed;
}

}  // namespace relscm
