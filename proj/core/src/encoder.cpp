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

#include "proxtrace/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "proxtrace/detail/text.hpp"
#include "proxtrace/error.hpp"
#include "proxtrace/rng.hpp"

namespace proxtrace {

namespace {

constexpr double kDependentNorm = 1e-12;
constexpr std::string_view kEncoderMagic = "# proxtrace-encoder v1";

double
dot(const double* a, const double* b, std::size_t n) noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

}  // namespace

ProjectionBasis::ProjectionBasis(std::size_t input_dim, std::vector<double> rows, std::uint64_t seed)
    : input_dim_(input_dim), rows_(std::move(rows)), seed_(seed) {
}

ProjectionBasis
ProjectionBasis::build(std::size_t input_dim, std::size_t size, std::uint64_t seed) {
    if (input_dim < 1) {
        throw Error(ErrorKind::invalid_argument, "basis input dimension must be >= 1");
    }
    if (size < 1) {
        throw Error(ErrorKind::invalid_argument, "basis size p must be >= 1");
    }
    Rng rng(seed);
    std::vector<double> rows(size * input_dim);
    for (std::size_t i = 0; i < size; ++i) {
        double* v = rows.data() + i * input_dim;
        // Orthogonalize only against earlier vectors of the same block.
        const std::size_t block_start = (i / input_dim) * input_dim;
        while (true) {
            for (std::size_t c = 0; c < input_dim; ++c) {
                v[c] = rng.normal();
            }
            for (std::size_t j = block_start; j < i; ++j) {
                const double* u = rows.data() + j * input_dim;
                const double coeff = dot(v, u, input_dim);
                for (std::size_t c = 0; c < input_dim; ++c) {
                    v[c] -= coeff * u[c];
                }
            }
            const double norm = std::sqrt(dot(v, v, input_dim));
            if (norm >= kDependentNorm) {
                for (std::size_t c = 0; c < input_dim; ++c) {
                    v[c] /= norm;
                }
                break;
            }
        }
    }
    return ProjectionBasis(input_dim, std::move(rows), seed);
}

ProjectionBasis
ProjectionBasis::from_rows(std::size_t input_dim, std::vector<double> rows, std::uint64_t seed) {
    if (input_dim < 1 || rows.empty() || rows.size() % input_dim != 0) {
        throw Error(ErrorKind::invalid_argument, "basis rows must be a non-empty multiple of the input dimension");
    }
    for (double c : rows) {
        if (!std::isfinite(c)) {
            throw Error(ErrorKind::invalid_argument, "basis has a non-finite component");
        }
    }
    return ProjectionBasis(input_dim, std::move(rows), seed);
}

std::vector<double>
project(std::span<const double> w, const ProjectionBasis& basis) {
    if (w.size() != basis.input_dim()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "cannot project a " + std::to_string(w.size()) + "-d vector with a basis over R^" +
                        std::to_string(basis.input_dim()));
    }
    std::vector<double> out(basis.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = dot(w.data(), basis.vector(i).data(), w.size());
    }
    return out;
}

GridSpec::GridSpec(double alpha, double beta, std::uint32_t intervals)
    : alpha_(alpha), beta_(beta), intervals_(intervals), delta_(0.0) {
    if (!std::isfinite(alpha) || !std::isfinite(beta)) {
        throw Error(ErrorKind::invalid_argument, "grid bounds must be finite");
    }
    if (!(beta > alpha)) {
        throw Error(ErrorKind::degenerate_data, "grid needs beta > alpha");
    }
    if (intervals < 1 || intervals == std::numeric_limits<std::uint32_t>::max()) {
        throw Error(ErrorKind::invalid_argument, "grid interval count out of range");
    }
    delta_ = (beta - alpha) / static_cast<double>(intervals);
}

GridSpec
fit_grid(std::span<const double> projected, std::size_t width, std::uint32_t intervals) {
    if (projected.empty() || width == 0) {
        throw Error(ErrorKind::invalid_argument, "cannot fit a grid on an empty dataset");
    }
    if (projected.size() % width != 0) {
        throw Error(ErrorKind::dimension_mismatch, "projected matrix is not a whole number of rows");
    }
    if (intervals < 1) {
        throw Error(ErrorKind::invalid_argument, "grid needs at least one interval");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double c : projected) {
        if (!std::isfinite(c)) {
            throw Error(ErrorKind::invalid_argument, "projected dataset has a non-finite component");
        }
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    if (!(hi > lo)) {
        throw Error(ErrorKind::degenerate_data, "all projected components are equal; grid range is empty");
    }
    return GridSpec(lo, hi, intervals);
}

GridSpec
fit_grid(const std::vector<std::vector<double>>& projected, std::uint32_t intervals) {
    if (projected.empty()) {
        throw Error(ErrorKind::invalid_argument, "cannot fit a grid on an empty dataset");
    }
    const std::size_t width = projected.front().size();
    std::vector<double> flat;
    flat.reserve(projected.size() * width);
    for (const auto& row : projected) {
        if (row.size() != width) {
            throw Error(ErrorKind::dimension_mismatch, "projected rows differ in length");
        }
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return fit_grid(flat, width, intervals);
}

EncodedPoint
quantize(std::span<const double> x, const GridSpec& grid) {
    EncodedPoint out;
    out.cells.resize(x.size());
    const double top = static_cast<double>(grid.intervals());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) {
            throw Error(ErrorKind::invalid_argument, "cannot quantize a non-finite coordinate");
        }
        const double clamped = std::clamp(x[i], grid.alpha(), grid.beta());
        // Rounding in (beta - alpha) / delta can land a hair above M.
        const double cell = std::min(std::ceil((clamped - grid.alpha()) / grid.delta()), top);
        out.cells[i] = static_cast<Cell>(cell);
    }
    return out;
}

double
quantized_distance(const EncodedPoint& a, const EncodedPoint& b) {
    if (a.cells.size() != b.cells.size()) {
        throw Error(ErrorKind::dimension_mismatch, "encoded points differ in length");
    }
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        const std::int64_t diff = static_cast<std::int64_t>(a.cells[i]) - static_cast<std::int64_t>(b.cells[i]);
        sum += static_cast<std::uint64_t>(diff * diff);
    }
    return std::sqrt(static_cast<double>(sum));
}

double
distortion_bound(std::size_t p, double delta, double epsilon) {
    if (p < 1 || !(delta > 0.0) || !(epsilon > 0.0)) {
        throw Error(ErrorKind::invalid_argument, "distortion bound needs positive p, delta and epsilon");
    }
    return std::sqrt(static_cast<double>(p)) * delta / epsilon;
}

EncodingModel::EncodingModel(ProjectionBasis basis, GridSpec grid) : basis_(std::move(basis)), grid_(grid) {
}

EncodingModel
EncodingModel::fit(std::span<const SpaceTimePoint> corpus, std::size_t p, std::uint32_t intervals, std::uint64_t seed) {
    if (corpus.empty()) {
        throw Error(ErrorKind::invalid_argument, "cannot fit an encoder on an empty corpus");
    }
    auto basis = ProjectionBasis::build(kSpaceTimeDim, p, seed);
    std::vector<double> projected;
    projected.reserve(corpus.size() * p);
    for (const auto& w : corpus) {
        const auto x = proxtrace::project(std::span<const double>(w.coords()), basis);
        projected.insert(projected.end(), x.begin(), x.end());
    }
    auto grid = fit_grid(projected, p, intervals);
    return EncodingModel(std::move(basis), grid);
}

EncodedPoint
EncodingModel::encode(std::span<const double> w) const {
    return quantize(proxtrace::project(w, basis_), grid_);
}

void
EncodingModel::write(std::ostream& out) const {
    out << kEncoderMagic << '\n';
    out << "seed " << basis_.seed() << '\n';
    out << "input_dim " << basis_.input_dim() << '\n';
    out << "size " << basis_.size() << '\n';
    out << "basis\n";
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        const auto v = basis_.vector(i);
        for (std::size_t c = 0; c < v.size(); ++c) {
            out << (c ? " " : "") << detail::format_double(v[c]);
        }
        out << '\n';
    }
    out << "alpha " << detail::format_double(grid_.alpha()) << '\n';
    out << "beta " << detail::format_double(grid_.beta()) << '\n';
    out << "intervals " << grid_.intervals() << '\n';
}

namespace {

std::string
expect_field(std::istream& in, std::string_view key) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::format, "encoder file truncated before '" + std::string(key) + "'");
    }
    std::string_view view = detail::trim(line);
    if (view.substr(0, key.size()) != key || (view.size() > key.size() && view[key.size()] != ' ')) {
        throw Error(ErrorKind::format, "encoder file: expected '" + std::string(key) + "', got '" + line + "'");
    }
    return std::string(detail::trim(view.substr(key.size())));
}

template <typename Int>
Int
int_field(std::istream& in, std::string_view key) {
    const auto text = expect_field(in, key);
    const auto value = detail::parse_int<Int>(text);
    if (!value) {
        throw Error(ErrorKind::format, "encoder file: bad integer for '" + std::string(key) + "'");
    }
    return *value;
}

double
double_field(std::istream& in, std::string_view key) {
    const auto text = expect_field(in, key);
    const auto value = detail::parse_double(text);
    if (!value) {
        throw Error(ErrorKind::format, "encoder file: bad real for '" + std::string(key) + "'");
    }
    return *value;
}

}  // namespace

EncodingModel
EncodingModel::read(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || detail::trim(line).substr(0, 20) != kEncoderMagic.substr(0, 20)) {
        throw Error(ErrorKind::format, "not an encoder file (missing header)");
    }
    if (detail::trim(line) != kEncoderMagic) {
        throw Error(ErrorKind::version, "unsupported encoder file version: " + line);
    }
    const auto seed = int_field<std::uint64_t>(in, "seed");
    const auto input_dim = int_field<std::size_t>(in, "input_dim");
    const auto size = int_field<std::size_t>(in, "size");
    if (input_dim < 1 || size < 1 || input_dim > 4096 || size > 4096) {
        throw Error(ErrorKind::format, "encoder file: implausible basis shape");
    }
    expect_field(in, "basis");
    std::vector<double> rows;
    rows.reserve(size * input_dim);
    for (std::size_t i = 0; i < size; ++i) {
        if (!std::getline(in, line)) {
            throw Error(ErrorKind::format, "encoder file truncated inside basis");
        }
        std::istringstream row(line);
        std::string token;
        std::size_t count = 0;
        while (row >> token) {
            const auto value = detail::parse_double(token);
            if (!value) {
                throw Error(ErrorKind::format, "encoder file: bad basis component '" + token + "'");
            }
            rows.push_back(*value);
            ++count;
        }
        if (count != input_dim) {
            throw Error(ErrorKind::format, "encoder file: basis row " + std::to_string(i) + " has wrong length");
        }
    }
    const double alpha = double_field(in, "alpha");
    const double beta = double_field(in, "beta");
    const auto intervals = int_field<std::uint32_t>(in, "intervals");
    return EncodingModel(ProjectionBasis::from_rows(input_dim, std::move(rows), seed), GridSpec(alpha, beta, intervals));
}

void
EncodingModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
    }
    write(out);
    if (!out) {
        throw Error(ErrorKind::io, "write failed: " + path.string());
    }
}

EncodingModel
EncodingModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::io, "cannot open " + path.string());
    }
    return read(in);
}

}  // namespace proxtrace
