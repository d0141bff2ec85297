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

#include "relscm/error.h"

namespace relscm {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter: return "invalid parameter";
    case ErrorCode::kInvalidConfig: return "invalid config";
    case ErrorCode::kInvalidInput: return "invalid input";
    case ErrorCode::kDegenerateGraph: return "degenerate graph";
    case ErrorCode::kContractViolation: return "contract violation";
    case ErrorCode::kNumerical: return "numerical error";
    case ErrorCode::kUndefinedMetric: return "undefined metric";
    case ErrorCode::kIo: return "io error";
  }
  return "error";
}

}  // namespace relscm
