// Copyright 2026 The vanc Authors
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

// JSON model files.
//
//   {
//     "n": 3,                                   optional, checked if present
//     "coordinates": ["x", "y", "theta"],
//     "parameters": {"m": 1.0, "I": 1.0},      optional
//     "metric": [["m", "0", "0"], ...],         n x n
//     "potential": "0",                         optional, default "0"
//     "external_force": ["...", "...", "0"],    optional, default zeros
//     "inputs": [["sin(theta)", "-cos(theta)", "1"]],
//     "constraint": {
//       "mu": [["sin(theta)", "-cos(theta)", "0"]],
//       "Z": ["cos(theta)*C2 - sin(theta)*C1"]  or "X": [n entries], Z = -S X
//     }
//   }
//
// Every expression is a string in the expression language. Unknown keys are
// rejected.

#ifndef VANC_MODEL_FILE_HPP_
#define VANC_MODEL_FILE_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "vanc/errors.hpp"
#include "vanc/models.hpp"

namespace vanc {

// Location-tagged load failure. `offset` is the byte offset inside the
// offending expression string when the failure is an expression parse error.
class ModelFileError : public ModelError {
 public:
  ModelFileError(const std::string& location, const std::string& message,
                 std::optional<std::size_t> offset = std::nullopt)
      : ModelError(location.empty() ? message : location + ": " + message),
        location_(location),
        offset_(offset) {}
  const std::string& location() const { return location_; }
  std::optional<std::size_t> offset() const { return offset_; }

 private:
  std::string location_;
  std::optional<std::size_t> offset_;
};

System parse_model_file(std::string_view json_text);
System load_model_file(const std::filesystem::path& path);

// Pretty-printed JSON with every expression printed at full precision.
std::string write_model_file(const System& system);

}  // namespace vanc

#endif  // VANC_MODEL_FILE_HPP_
