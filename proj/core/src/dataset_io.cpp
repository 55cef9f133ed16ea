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


#include "proxtrace/dataset_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string_view>
#include <vector>

#include "proxtrace/detail/text.hpp"
#include "proxtrace/error.hpp"
#include "proxtrace/rng.hpp"

namespace proxtrace {

namespace {

constexpr std::string_view kPointsMagic = "# proxtrace-points v1";
constexpr std::string_view kTruthMagic = "# proxtrace-truth v1";
constexpr std::string_view kPointsColumns = "user_id,x,y,z,t";

[[noreturn]] void
fail_at(const std::string& source, std::size_t line, const std::string& what) {
    throw Error(ErrorKind::format, source + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string_view>
split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(detail::trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            return out;
        }
        start = comma + 1;
    }
}

/// Value of `key=` inside a header line, empty when absent.
std::string_view
header_field(std::string_view header, std::string_view key) {
    std::size_t pos = 0;
    while ((pos = header.find(key, pos)) != std::string_view::npos) {
        if ((pos == 0 || header[pos - 1] == ' ') && pos + key.size() < header.size() &&
            header[pos + key.size()] == '=') {
            auto value = header.substr(pos + key.size() + 1);
            return value.substr(0, value.find(' '));
        }
        pos += key.size();
    }
    return {};
}

std::ifstream
open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::io, "cannot open " + path.string());
    }
    return in;
}

std::ofstream
open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::io, "cannot write " + path.string());
    }
    return out;
}

}  // namespace

DatasetFiles
DatasetFiles::from_prefix(const std::filesystem::path& prefix) {
    const auto base = prefix.string();
    return {base + ".points.csv", base + ".truth.csv"};
}

void
write_points(std::ostream& out, const Dataset& dataset) {
    out << kPointsMagic << " prng=" << Rng::kAlgorithm << " kind=" << dataset.kind
        << " population=" << dataset.population << '\n';
    out << kPointsColumns << '\n';
    for (const auto& rec : dataset.records) {
        for (const auto& p : rec.points) {
            out << rec.user_id;
            for (double c : p.coords()) {
                out << ',' << detail::format_double(c);
            }
            out << '\n';
        }
    }
}

void
write_truth(std::ostream& out, const ContactGroundTruth& truth) {
    out << kTruthMagic << '\n';
    for (const auto& [user, contacts] : truth.entries()) {
        out << user;
        for (UserId c : contacts) {
            out << ',' << c;
        }
        out << '\n';
    }
}

void
read_points(std::istream& in, const std::string& source, Dataset& dataset) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || !line.starts_with(kPointsMagic)) {
        if (line.starts_with("# proxtrace-points")) {
            throw Error(ErrorKind::version, source + ":1: unsupported points format: " + line);
        }
        fail_at(source, 1, "missing '" + std::string(kPointsMagic) + "' header");
    }
    const auto prng = header_field(line, "prng");
    if (!prng.empty() && prng != Rng::kAlgorithm) {
        throw Error(ErrorKind::version, source + ":1: generated with prng " + std::string(prng));
    }
    const auto kind = header_field(line, "kind");
    dataset.kind = kind.empty() ? "walks" : std::string(kind);
    dataset.population = 0;
    if (const auto pop = header_field(line, "population"); !pop.empty()) {
        const auto value = detail::parse_int<std::size_t>(pop);
        if (!value) {
            fail_at(source, 1, "bad population '" + std::string(pop) + "'");
        }
        dataset.population = *value;
    }

    std::map<UserId, std::vector<SpaceTimePoint>> by_user;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = detail::trim(line);
        if (row.empty() || row.starts_with('#') || row == kPointsColumns) {
            continue;
        }
        const auto fields = split_commas(row);
        if (fields.size() != 5) {
            fail_at(source, line_no, "expected 5 fields, got " + std::to_string(fields.size()));
        }
        const auto user = detail::parse_int<UserId>(fields[0]);
        if (!user) {
            fail_at(source, line_no, "bad user_id '" + std::string(fields[0]) + "'");
        }
        double c[4];
        for (std::size_t i = 0; i < 4; ++i) {
            const auto v = detail::parse_double(fields[i + 1]);
            if (!v || !std::isfinite(*v)) {
                fail_at(source, line_no, "non-numeric coordinate '" + std::string(fields[i + 1]) + "'");
            }
            c[i] = *v;
        }
        by_user[*user].emplace_back(c[0], c[1], c[2], c[3]);
    }
    dataset.records.clear();
    dataset.records.reserve(by_user.size());
    for (auto& [user, points] : by_user) {
        dataset.records.push_back({user, std::move(points)});
    }
}

ContactGroundTruth
read_truth(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || !line.starts_with(kTruthMagic)) {
        if (line.starts_with("# proxtrace-truth")) {
            throw Error(ErrorKind::version, source + ":1: unsupported truth format: " + line);
        }
        fail_at(source, 1, "missing '" + std::string(kTruthMagic) + "' header");
    }
    ContactGroundTruth truth;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = detail::trim(line);
        if (row.empty() || row.starts_with('#')) {
            continue;
        }
        const auto fields = split_commas(row);
        std::vector<UserId> ids;
        ids.reserve(fields.size());
        for (auto f : fields) {
            const auto v = detail::parse_int<UserId>(f);
            if (!v) {
                fail_at(source, line_no, "bad user id '" + std::string(f) + "'");
            }
            ids.push_back(*v);
        }
        std::set<UserId> contacts(ids.begin() + 1, ids.end());
        if (contacts.contains(ids[0])) {
            fail_at(source, line_no, "user lists itself as a contact");
        }
        truth.set_contacts(ids[0], std::move(contacts));
    }
    return truth;
}

void
save_dataset(const Dataset& dataset, const DatasetFiles& files) {
    auto points = open_out(files.points);
    write_points(points, dataset);
    auto truth = open_out(files.truth);
    write_truth(truth, dataset.truth);
    if (!points.flush() || !truth.flush()) {
        throw Error(ErrorKind::io, "write failed for " + files.points.string());
    }
}

Dataset
load_dataset(const DatasetFiles& files) {
    Dataset ds;
    {
        auto in = open_in(files.points);
        read_points(in, files.points.string(), ds);
    }
    if (std::filesystem::exists(files.truth)) {
        auto in = open_in(files.truth);
        ds.truth = read_truth(in, files.truth.string());
    } else {
        ds.truth_missing = true;
    }
    return ds;
}

}  // namespace proxtrace
