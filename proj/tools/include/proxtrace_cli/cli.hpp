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

#include <iosfwd>
#include <string>
#include <vector>

namespace proxtrace::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kMissingInput = 3,
    kBadData = 4,
    kSelfCheckFailed = 5,
};

/// Relative output paths resolve against this directory when set.
inline constexpr const char* kOutDirEnv = "PROXTRACE_OUT_DIR";

/// Parses and runs one command line. Errors go to `err` as a single line
/// "proxtrace: error[<kind>]: <message>".
int
run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int
run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace proxtrace::cli
