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

#include <filesystem>
#include <iosfwd>
#include <string>

#include "proxtrace/trajectory.hpp"

namespace proxtrace {

/// A dataset lives in two files: points (one row per sample) and ground truth
/// (one row per user with contacts).
struct DatasetFiles {
    std::filesystem::path points;
    std::filesystem::path truth;

    /// "<prefix>.points.csv" and "<prefix>.truth.csv".
    static DatasetFiles
    from_prefix(const std::filesystem::path& prefix);
};

void
write_points(std::ostream& out, const Dataset& dataset);

void
write_truth(std::ostream& out, const ContactGroundTruth& truth);

/// `source` names the stream in error messages. Fills records, kind and
/// population; leaves truth untouched.
void
read_points(std::istream& in, const std::string& source, Dataset& dataset);

ContactGroundTruth
read_truth(std::istream& in, const std::string& source);

void
save_dataset(const Dataset& dataset, const DatasetFiles& files);

/// Throws Error(io) if the points file cannot be opened and Error(format) on
/// malformed rows (the message carries file:line). A missing truth file is not
/// an error; the result has an empty truth and truth_missing set.
Dataset
load_dataset(const DatasetFiles& files);

}  // namespace proxtrace
