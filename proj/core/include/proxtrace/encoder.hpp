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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "proxtrace/geometry.hpp"

namespace proxtrace {

/// p random directions over R^d, orthonormalized by Gram-Schmidt.
///
/// When p <= d the whole set is orthonormal. When p > d, mutual orthogonality
/// is impossible; the vectors are then orthonormalized in consecutive blocks
/// of d (each block is an orthonormal frame, the basis as a whole is
/// overcomplete). A full block maps any vector to one of the same norm, so a
/// basis made of p/d full blocks scales every distance by exactly sqrt(p/d).
class ProjectionBasis {
 public:
    /// Components are drawn from N(0, 1) with Rng(seed). A vector whose norm
    /// falls below 1e-12 after orthogonalization is redrawn.
    static ProjectionBasis
    build(std::size_t input_dim, std::size_t size, std::uint64_t seed);

    /// Wraps explicit row-major vectors (used by loaders and tests).
    static ProjectionBasis
    from_rows(std::size_t input_dim, std::vector<double> rows, std::uint64_t seed);

    std::size_t
    input_dim() const noexcept {
        return input_dim_;
    }
    std::size_t
    size() const noexcept {
        return input_dim_ == 0 ? 0 : rows_.size() / input_dim_;
    }
    std::uint64_t
    seed() const noexcept {
        return seed_;
    }

    std::span<const double>
    vector(std::size_t i) const noexcept {
        return {rows_.data() + i * input_dim_, input_dim_};
    }

    /// All vectors, row-major.
    std::span<const double>
    rows() const noexcept {
        return rows_;
    }

    bool
    operator==(const ProjectionBasis&) const = default;

 private:
    ProjectionBasis(std::size_t input_dim, std::vector<double> rows, std::uint64_t seed);

    std::size_t input_dim_ = 0;
    std::vector<double> rows_;
    std::uint64_t seed_ = 0;
};

inline ProjectionBasis
build_basis(std::size_t input_dim, std::size_t size, std::uint64_t seed) {
    return ProjectionBasis::build(input_dim, size, seed);
}

/// Component i is the dot product of w with basis vector i.
std::vector<double>
project(std::span<const double> w, const ProjectionBasis& basis);

/// Uniform grid over [alpha, beta] with M intervals of width delta.
class GridSpec {
 public:
    /// Throws Error(invalid_argument) unless alpha < beta, both are finite and
    /// intervals >= 1.
    GridSpec(double alpha, double beta, std::uint32_t intervals);

    double
    alpha() const noexcept {
        return alpha_;
    }
    double
    beta() const noexcept {
        return beta_;
    }
    std::uint32_t
    intervals() const noexcept {
        return intervals_;
    }
    double
    delta() const noexcept {
        return delta_;
    }

    /// Centre of interval r in [0, M).
    double
    centre(std::uint32_t r) const noexcept {
        return alpha_ + (static_cast<double>(r) + 0.5) * delta_;
    }

    bool
    operator==(const GridSpec&) const = default;

 private:
    double alpha_;
    double beta_;
    std::uint32_t intervals_;
    double delta_;
};

/// Fits alpha/beta as the global min/max over every component of every
/// vector in a row-major matrix with `width` columns.
///
/// Throws Error(invalid_argument) for an empty or non-finite dataset and
/// Error(degenerate_data) when all components are equal.
GridSpec
fit_grid(std::span<const double> projected, std::size_t width, std::uint32_t intervals);

GridSpec
fit_grid(const std::vector<std::vector<double>>& projected, std::uint32_t intervals);

/// Cell index type; wide enough for a million intervals per axis.
using Cell = std::uint32_t;

struct EncodedPoint {
    std::vector<Cell> cells;

    bool
    operator==(const EncodedPoint&) const = default;
};

/// ceil((x_i - alpha) / delta) per component after clamping x_i into
/// [alpha, beta]. alpha maps to cell 0, beta to cell M.
EncodedPoint
quantize(std::span<const double> x, const GridSpec& grid);

/// L2 distance over cell indices. Throws on length mismatch.
double
quantized_distance(const EncodedPoint& a, const EncodedPoint& b);

/// sqrt(p) * delta / epsilon: the largest factor by which quantizing can
/// stretch the separation of two points on an epsilon-ball.
double
distortion_bound(std::size_t p, double delta, double epsilon);

/// A fitted projection + quantization pipeline. Immutable once built.
class EncodingModel {
 public:
    EncodingModel(ProjectionBasis basis, GridSpec grid);

    /// Builds a basis and fits the grid on the projections of `corpus`.
    static EncodingModel
    fit(std::span<const SpaceTimePoint> corpus, std::size_t p, std::uint32_t intervals, std::uint64_t seed);

    const ProjectionBasis&
    basis() const noexcept {
        return basis_;
    }
    const GridSpec&
    grid() const noexcept {
        return grid_;
    }
    std::size_t
    output_dim() const noexcept {
        return basis_.size();
    }

    std::vector<double>
    project(std::span<const double> w) const {
        return proxtrace::project(w, basis_);
    }

    EncodedPoint
    encode(std::span<const double> w) const;

    EncodedPoint
    encode(const SpaceTimePoint& w) const {
        return encode(std::span<const double>(w.coords()));
    }

    void
    write(std::ostream& out) const;

    static EncodingModel
    read(std::istream& in);

    void
    save(const std::filesystem::path& path) const;

    static EncodingModel
    load(const std::filesystem::path& path);

    bool
    operator==(const EncodingModel&) const = default;

 private:
    ProjectionBasis basis_;
    GridSpec grid_;
};

}  // namespace proxtrace
