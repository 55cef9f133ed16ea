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

#include <array>
#include <cstddef>
#include <span>

namespace proxtrace {

/// Dimension of a raw location sample: three Cartesian axes plus time.
inline constexpr std::size_t kSpaceTimeDim = 4;

inline constexpr double kEarthRadiusKm = 6371.0;

/// A validated latitude/longitude fix with a timestamp in seconds.
class GeoPoint {
 public:
    /// Throws Error(invalid_argument) when latitude is outside [-90, 90],
    /// longitude outside [-180, 180], or the timestamp is negative or any
    /// component is non-finite.
    GeoPoint(double latitude_deg, double longitude_deg, double timestamp_s);

    double
    latitude() const noexcept {
        return latitude_;
    }
    double
    longitude() const noexcept {
        return longitude_;
    }
    double
    timestamp() const noexcept {
        return timestamp_;
    }

 private:
    double latitude_;
    double longitude_;
    double timestamp_;
};

/// A point (x, y, z, t) in space-time. All components are finite.
class SpaceTimePoint {
 public:
    SpaceTimePoint() = default;

    /// Throws Error(invalid_argument) if any component is non-finite.
    SpaceTimePoint(double x, double y, double z, double t);

    /// Builds a point whose time axis is `t * time_scale`. The scale puts time
    /// into the same units as the spatial axes before any distance is taken.
    static SpaceTimePoint
    scaled(double x, double y, double z, double t, double time_scale);

    std::span<const double, kSpaceTimeDim>
    coords() const noexcept {
        return coords_;
    }

    double
    operator[](std::size_t axis) const noexcept {
        return coords_[axis];
    }

    double
    x() const noexcept {
        return coords_[0];
    }
    double
    y() const noexcept {
        return coords_[1];
    }
    double
    z() const noexcept {
        return coords_[2];
    }
    double
    t() const noexcept {
        return coords_[3];
    }

    bool
    operator==(const SpaceTimePoint&) const = default;

 private:
    std::array<double, kSpaceTimeDim> coords_{};
};

enum class Metric {
    euclidean,
    chebyshev,
};

/// Spherical-to-Cartesian conversion on a sphere of radius `earth_radius_km`;
/// the timestamp becomes the fourth axis after multiplying by `time_scale`.
SpaceTimePoint
geo_to_cartesian(const GeoPoint& g, double earth_radius_km = kEarthRadiusKm, double time_scale = 1.0);

/// Throws Error(dimension_mismatch) when the spans differ in length.
double
distance(std::span<const double> a, std::span<const double> b, Metric metric = Metric::euclidean);

double
distance(const SpaceTimePoint& a, const SpaceTimePoint& b, Metric metric = Metric::euclidean);

/// Sum of squared componentwise differences, accumulated left to right.
/// Every index ranks candidates by this value, so its evaluation order is
/// part of the tie-breaking contract. Lengths are not checked.
inline double
squared_l2(const double* a, const double* b, std::size_t dim) noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double diff = a[i] - b[i];
        sum += diff * diff;
    }
    return sum;
}

}  // namespace proxtrace
