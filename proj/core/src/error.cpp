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

#include "proxtrace/error.hpp"

namespace proxtrace {

std::string_view
to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_argument:
            return "invalid_argument";
        case ErrorKind::dimension_mismatch:
            return "dimension_mismatch";
        case ErrorKind::degenerate_data:
            return "degenerate_data";
        case ErrorKind::duplicate_id:
            return "duplicate_id";
        case ErrorKind::representation_mismatch:
            return "representation_mismatch";
        case ErrorKind::over_dense:
            return "over_dense";
        case ErrorKind::io:
            return "io";
        case ErrorKind::format:
            return "format";
        case ErrorKind::version:
            return "version";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {
}

}  // namespace proxtrace
