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


#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "proxtrace/error.hpp"
#include "proxtrace/geometry.hpp"
#include "proxtrace/rng.hpp"

namespace proxtrace {
namespace {

TEST(GeoPoint, RejectsOutOfRangeCoordinates) {
    EXPECT_THROW(GeoPoint(91.0, 0.0, 0.0), Error);
    EXPECT_THROW(GeoPoint(-90.5, 0.0, 0.0), Error);
    EXPECT_THROW(GeoPoint(0.0, 180.5, 0.0), Error);
    EXPECT_THROW(GeoPoint(0.0, 0.0, -1.0), Error);
    EXPECT_THROW(GeoPoint(NAN, 0.0, 0.0), Error);
    EXPECT_NO_THROW(GeoPoint(90.0, -180.0, 0.0));
}

TEST(GeoToCartesian, AxisPoints) {
    const auto origin = geo_to_cartesian(GeoPoint(0.0, 0.0, 5.0));
    EXPECT_NEAR(origin.x(), kEarthRadiusKm, 1e-9);
    EXPECT_NEAR(origin.y(), 0.0, 1e-9);
    EXPECT_NEAR(origin.z(), 0.0, 1e-9);
    EXPECT_EQ(origin.t(), 5.0);

    const auto pole = geo_to_cartesian(GeoPoint(90.0, 0.0, 0.0));
    EXPECT_NEAR(pole.z(), kEarthRadiusKm, 1e-9);
    EXPECT_NEAR(std::hypot(pole.x(), pole.y()), 0.0, 1e-9);

    const auto east = geo_to_cartesian(GeoPoint(0.0, 90.0, 2.0), 1.0, 3.0);
    EXPECT_NEAR(east.y(), 1.0, 1e-12);
    EXPECT_EQ(east.t(), 6.0);
}

TEST(GeoToCartesian, StaysOnSphere) {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const auto p = geo_to_cartesian(GeoPoint(rng.uniform(-90, 90), rng.uniform(-180, 180), 0.0));
        EXPECT_NEAR(std::sqrt(p.x() * p.x() + p.y() * p.y() + p.z() * p.z()), kEarthRadiusKm, 1e-8);
    }
}

TEST(SpaceTimePoint, RejectsNonFinite) {
    EXPECT_THROW(SpaceTimePoint(0, 0, INFINITY, 0), Error);
    EXPECT_THROW(SpaceTimePoint::scaled(0, 0, 0, 1, NAN), Error);
}

TEST(Distance, HandValues) {
    const SpaceTimePoint a(0, 0, 0, 0);
    const SpaceTimePoint b(3, 4, 0, 0);
    const SpaceTimePoint c(1, -2, 3, -7);
    EXPECT_DOUBLE_EQ(distance(a, b), 5.0);
    EXPECT_DOUBLE_EQ(distance(a, b, Metric::chebyshev), 4.0);
    EXPECT_DOUBLE_EQ(distance(a, c, Metric::chebyshev), 7.0);
    EXPECT_DOUBLE_EQ(distance(c, c), 0.0);
}

TEST(Distance, DimensionMismatch) {
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> b{1, 2};
    try {
        (void)distance(a, b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::dimension_mismatch);
    }
}

TEST(Distance, MetricAxiomsOnRandomTriples) {
    Rng rng(11);
    const auto draw = [&] {
        return SpaceTimePoint(rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(0, 100));
    };
    for (const auto metric : {Metric::euclidean, Metric::chebyshev}) {
        for (int i = 0; i < 5000; ++i) {
            const auto a = draw();
            const auto b = draw();
            const auto c = draw();
            const double ab = distance(a, b, metric);
            EXPECT_GE(ab, 0.0);
            EXPECT_EQ(ab, distance(b, a, metric));
            EXPECT_EQ(distance(a, a, metric), 0.0);
            EXPECT_LE(distance(a, c, metric), ab + distance(b, c, metric) + 1e-9);
        }
    }
}

TEST(Distance, ChebyshevNeverExceedsEuclidean) {
    Rng rng(12);
    for (int i = 0; i < 1000; ++i) {
        const SpaceTimePoint a(rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1));
        const SpaceTimePoint b(rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1));
        const double linf = distance(a, b, Metric::chebyshev);
        const double l2 = distance(a, b);
        EXPECT_LE(linf, l2);
        EXPECT_LE(l2, 2.0 * linf + 1e-12);
    }
}

}  // namespace
}  // namespace proxtrace
