// Copyright 2026 The radarpr Authors
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

#include "error.hpp"

namespace radarpr {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kArgument: return "argument error";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kIo: return "I/O error";
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kOutOfRange: return "out-of-range error";
    case ErrorCode::kGap: return "gap error";
    case ErrorCode::kBatch: return "batch-construction error";
    case ErrorCode::kNumeric: return "numeric error";
    case ErrorCode::kIntegrity: return "integrity error";
    case ErrorCode::kMismatch: return "config-mismatch error";
    case ErrorCode::kEmpty: return "empty-sequence error";
  }
  return "unknown error";
}

}  // namespace radarpr
