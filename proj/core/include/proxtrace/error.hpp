// Copyright 2026 The proxtrace Authors.
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace proxtrace {

enum class ErrorKind {
    invalid_argument,
    dimension_mismatch,
    degenerate_data,
    duplicate_id,
    representation_mismatch,
    over_dense,
    io,
    format,
    version,
};

std::string_view
to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `kind()` lets callers (the CLI in
/// particular) map failures to distinct exit codes without parsing messages.
class Error : public std::runtime_error {
 public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind
    kind() const noexcept {
        return kind_;
    }

    /// The text without the "kind: " prefix that what() carries.
    const std::string&
    message() const noexcept {
        return message_;
    }

 private:
    ErrorKind kind_;
    std::string message_;
};

}  // namespace proxtrace
