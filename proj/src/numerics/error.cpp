/**
 * Copyright 2026 The IPL Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "numerics/error.hpp"

namespace ipl {

const char *error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kParameter: return "parameter error";
    case ErrorKind::kIndex: return "index error";
    case ErrorKind::kState: return "state error";
    case ErrorKind::kData: return "data error";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kNumeric: return "numeric error";
    case ErrorKind::kIo: return "io error";
  }
  return "error";
}

}  // namespace ipl
