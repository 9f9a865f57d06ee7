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

#ifndef IPL_NUMERICS_ERROR_HPP_
#define IPL_NUMERICS_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ipl {

enum class ErrorKind {
  kShape,
  kParameter,
  kIndex,
  kState,
  kData,
  kFormat,
  kConfig,
  kNumeric,
  kIo,
};

const char *error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

#define IPL_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string &what) : Error(Kind, what) {}      \
  };

IPL_DEFINE_ERROR(ShapeError, ErrorKind::kShape)
IPL_DEFINE_ERROR(ParameterError, ErrorKind::kParameter)
IPL_DEFINE_ERROR(IndexError, ErrorKind::kIndex)
IPL_DEFINE_ERROR(StateError, ErrorKind::kState)
IPL_DEFINE_ERROR(DataError, ErrorKind::kData)
IPL_DEFINE_ERROR(FormatError, ErrorKind::kFormat)
IPL_DEFINE_ERROR(ConfigError, ErrorKind::kConfig)
IPL_DEFINE_ERROR(NumericError, ErrorKind::kNumeric)
IPL_DEFINE_ERROR(IoError, ErrorKind::kIo)

#undef IPL_DEFINE_ERROR

}  // namespace ipl

#endif  // IPL_NUMERICS_ERROR_HPP_
