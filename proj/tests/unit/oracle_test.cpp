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


// Checks on the reference implementations themselves.

#include <gtest/gtest.h>

#include <vector>

#include "oracles.hpp"

namespace proxtrace::testing {
namespace {

TEST(Oracles, AverageRanks) {
    EXPECT_EQ(average_ranks({10, 30, 20}), (std::vector<double>{1, 3, 2}));
    EXPECT_EQ(average_ranks({5, 5, 1, 5}), (std::vector<double>{3, 3, 1, 3}));
}

TEST(Oracles, SpearmanKnownValues) {
    EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0);
    EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0);
    // Textbook example: d^2 sum = 2 over n = 5 gives 1 - 6*2/120 = 0.9.
    EXPECT_NEAR(spearman({1, 2, 3, 4, 5}, {2, 1, 3, 4, 5}), 0.9, 1e-12);
}

TEST(Oracles, Reachability) {
    const std::vector<std::vector<std::uint32_t>> g{{1}, {0, 2}, {1}, {}};
    EXPECT_EQ(reachable(g, 0), 3u);
    EXPECT_EQ(reachable(g, 3), 1u);
}

TEST(Oracles, NaiveKnnOrdersTiesById) {
    ann::ItemStore items(ann::Representation::raw, 1);
    items.add({5, 0, 0}, std::vector<double>{1});
    items.add({2, 0, 0}, std::vector<double>{-1});
    items.add({9, 0, 0}, std::vector<double>{0.5});
    const auto r = naive_knn(std::vector<double>{0}, 3, items);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(r[0].item_id, 9);
    EXPECT_EQ(r[1].item_id, 2);
    EXPECT_EQ(r[2].item_id, 5);
}

}  // namespace
}  // namespace proxtrace::testing
