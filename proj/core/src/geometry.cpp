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

#include "proxtrace/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "proxtrace/error.hpp"

namespace proxtrace {

GeoPoint::GeoPoint(double latitude_deg, double longitude_deg, double timestamp_s)
    : latitude_(latitude_deg), longitude_(longitude_deg), timestamp_(timestamp_s) {
    if (!std::isfinite(latitude_deg) || !std::isfinite(longitude_deg) || !std::isfinite(timestamp_s)) {
        throw Error(ErrorKind::invalid_argument, "geo point has a non-finite component");
    }
    if (latitude_deg < -90.0 || latitude_deg > 90.0) {
        throw Error(ErrorKind::invalid_argument, "latitude out of [-90, 90]: " + std::to_string(latitude_deg));
    }
    if (longitude_deg < -180.0 || longitude_deg > 180.0) {
        throw Error(ErrorKind::invalid_argument, "longitude out of [-180, 180]: " + std::to_string(longitude_deg));
    }
    if (timestamp_s < 0.0) {
        throw Error(ErrorKind::invalid_argument, "timestamp must be non-negative");
    }
}

SpaceTimePoint::SpaceTimePoint(double x, double y, double z, double t) : coords_{x, y, z, t} {
    for (double c : coords_) {
        if (!std::isfinite(c)) {
            throw Error(ErrorKind::invalid_argument, "space-time point has a non-finite component");
        }
    }
}

SpaceTimePoint
SpaceTimePoint::scaled(double x, double y, double z, double t, double time_scale) {
    if (!std::isfinite(time_scale) || time_scale <= 0.0) {
        throw Error(ErrorKind::invalid_argument, "time scale must be positive and finite");
    }
    return {x, y, z, t * time_scale};
}

SpaceTimePoint
geo_to_cartesian(const GeoPoint& g, double earth_radius_km, double time_scale) {
    if (!std::isfinite(earth_radius_km) || earth_radius_km <= 0.0) {
        throw Error(ErrorKind::invalid_argument, "earth radius must be positive and finite");
    }
    constexpr double kDegToRad = std::numbers::pi / 180.0;
    const double lat = g.latitude() * kDegToRad;
    const double lon = g.longitude() * kDegToRad;
    return SpaceTimePoint::scaled(earth_radius_km * std::cos(lat) * std::cos(lon),
                                  earth_radius_km * std::cos(lat) * std::sin(lon),
                                  earth_radius_km * std::sin(lat),
                                  g.timestamp(),
                                  time_scale);
}

double
distance(std::span<const double> a, std::span<const double> b, Metric metric) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "distance between vectors of length " + std::to_string(a.size()) + " and " +
                        std::to_string(b.size()));
    }
    if (metric == Metric::chebyshev) {
        double worst = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            worst = std::max(worst, std::abs(a[i] - b[i]));
        }
        return worst;
    }
    return std::sqrt(squared_l2(a.data(), b.data(), a.size()));
}

double
distance(const SpaceTimePoint& a, const SpaceTimePoint& b, Metric metric) {
    return distance(std::span<const double>(a.coords()), std::span<const double>(b.coords()), metric);
}

}  // namespace proxtrace
