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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "proxtrace/ann/brute_force.hpp"
#include "proxtrace/ann/hnsw.hpp"
#include "proxtrace/ann/kd_tree.hpp"
#include "proxtrace/error.hpp"

namespace proxtrace::ann {
namespace {

using proxtrace::testing::naive_knn;
using proxtrace::testing::uniform_queries;
using proxtrace::testing::uniform_store;

ErrorKind
kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorKind::io;
}

TEST(BruteForce, MatchesNaiveScan) {
    const auto items = uniform_store(2000, 4, 1);
    for (const auto& q : uniform_queries(50, 4, 2)) {
        for (std::size_t k : {1, 7, 100}) {
            ASSERT_EQ(brute_force_knn(q, k, items), naive_knn(q, k, items));
        }
    }
}

TEST(BruteForce, EdgeCases) {
    const auto items = uniform_store(5, 3, 3);
    const std::vector<double> q{0.5, 0.5, 0.5};
    EXPECT_EQ(brute_force_knn(q, 50, items).size(), 5u);
    EXPECT_EQ(kind_of([&] { (void)brute_force_knn(q, 0, items); }), ErrorKind::invalid_argument);
    const std::vector<double> short_q{0.5};
    EXPECT_EQ(kind_of([&] { (void)brute_force_knn(short_q, 1, items); }), ErrorKind::dimension_mismatch);
    const ItemStore empty(Representation::raw, 3);
    EXPECT_TRUE(brute_force_knn(q, 3, empty).empty());
}

TEST(BruteForce, TiesBreakByItemId) {
    ItemStore items(Representation::raw, 2);
    // Four points at distance 1 from the origin, inserted out of id order.
    items.add({9, 0, 0}, std::vector<double>{1, 0});
    items.add({3, 1, 0}, std::vector<double>{0, 1});
    items.add({5, 2, 0}, std::vector<double>{-1, 0});
    items.add({1, 3, 0}, std::vector<double>{0, -1});
    const BruteForceIndex index(std::move(items));
    const auto r = index.search(std::vector<double>{0, 0}, 3);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(r[0].item_id, 1);
    EXPECT_EQ(r[1].item_id, 3);
    EXPECT_EQ(r[2].item_id, 5);
}

TEST(BruteForce, RejectsDuplicateIds) {
    ItemStore items(Representation::raw, 1);
    items.add({1, 0, 0}, std::vector<double>{0});
    items.add({1, 1, 0}, std::vector<double>{1});
    EXPECT_EQ(kind_of([&] { BruteForceIndex index(std::move(items)); }), ErrorKind::duplicate_id);
}

TEST(ItemStore, EncodedItemsMustBeCells) {
    ItemStore items(Representation::encoded, 2);
    EXPECT_EQ(kind_of([&] { items.add({0, 0, 0}, std::vector<double>{1.5, 2}); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([&] { items.add({0, 0, 0}, std::vector<double>{-1, 2}); }), ErrorKind::invalid_argument);
    items.add({0, 0, 0}, EncodedPoint{{3, 4}});
    EXPECT_EQ(items.vector(0)[1], 4.0);
}

TEST(KdTree, MatchesOracleOnUniformData) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto items = uniform_store(3000, 4, 10 + seed);
        const KdTree tree(items);
        for (const auto& q : uniform_queries(40, 4, 20 + seed)) {
            for (std::size_t k : {1, 10, 100}) {
                ASSERT_EQ(tree.search(q, k), naive_knn(q, k, items));
            }
        }
    }
}

TEST(KdTree, MatchesOracleWithHeavyDuplicates) {
    // Coordinates on a coarse lattice: many exact ties and coincident points.
    Rng rng(5);
    ItemStore items(Representation::encoded, 3);
    for (std::int64_t i = 0; i < 2000; ++i) {
        items.add({i * 7 % 2003, i % 50, 0},
                  EncodedPoint{{static_cast<Cell>(rng.uniform_int(0, 4)),
                                static_cast<Cell>(rng.uniform_int(0, 4)),
                                static_cast<Cell>(rng.uniform_int(0, 4))}});
    }
    const KdTree tree(items);
    for (int i = 0; i < 60; ++i) {
        const std::vector<double> q{static_cast<double>(rng.uniform_int(0, 4)),
                                    static_cast<double>(rng.uniform_int(0, 4)),
                                    static_cast<double>(rng.uniform_int(0, 4))};
        for (std::size_t k : {1, 5, 64, 300}) {
            ASSERT_EQ(tree.search(q, k), naive_knn(q, k, items));
        }
    }
}

TEST(KdTree, StructureIsAMedianSplit) {
    const auto items = uniform_store(1023, 2, 6);
    const KdTree tree(items);
    ASSERT_EQ(tree.nodes().size(), 1023u);
    EXPECT_EQ(tree.height(), 10u);
    // Every slot appears exactly once.
    std::vector<int> seen(items.size(), 0);
    for (const auto& n : tree.nodes()) {
        ++seen[n.slot];
    }
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
}

TEST(KdTree, SearchBudgetStaysValid) {
    const auto items = uniform_store(5000, 4, 7);
    const KdTree tree(items, KdOptions{50});
    for (const auto& q : uniform_queries(20, 4, 8)) {
        const auto r = tree.search(q, 10);
        ASSERT_EQ(r.size(), 10u);
        EXPECT_TRUE(std::is_sorted(r.begin(), r.end(), [](const auto& a, const auto& b) {
            return a.distance < b.distance || (a.distance == b.distance && a.item_id < b.item_id);
        }));
    }
}

TEST(KdTree, RejectsEmptyStore) {
    EXPECT_EQ(kind_of([] { KdTree tree(ItemStore(Representation::raw, 4)); }), ErrorKind::invalid_argument);
}

TEST(Hnsw, RecallAgainstOracle) {
    const auto items = uniform_store(10000, 4, 30);
    const auto index = HnswIndex::build(items);
    double total = 0.0;
    const auto queries = uniform_queries(100, 4, 31);
    for (const auto& q : queries) {
        total += testing::overlap(index.search(q, 10), naive_knn(q, 10, items));
    }
    EXPECT_GE(total / static_cast<double>(queries.size()), 0.95);
}

TEST(Hnsw, ResultsSortedAndEfRaisedToK) {
    const auto items = uniform_store(3000, 4, 32);
    HnswParams params;
    params.ef_search = 5;
    const auto index = HnswIndex::build(items, params);
    const std::vector<double> q{0.5, 0.5, 0.5, 0.5};
    const auto r = index.search(q, 50);
    ASSERT_EQ(r.size(), 50u);
    for (std::size_t i = 1; i < r.size(); ++i) {
        EXPECT_LE(r[i - 1].distance, r[i].distance);
    }
}

TEST(Hnsw, DegreeCapsAndLayerZeroConnectivity) {
    const auto items = uniform_store(4000, 4, 33);
    const auto index = HnswIndex::build(items);
    std::vector<std::vector<std::uint32_t>> layer0(items.size());
    for (std::uint32_t s = 0; s < items.size(); ++s) {
        for (int l = 0; l <= index.level(s); ++l) {
            const auto nb = index.neighbors(s, l);
            ASSERT_LE(nb.size(), index.degree_cap(l));
            for (auto v : nb) {
                ASSERT_NE(v, s);
                ASSERT_GE(index.level(v), l);
            }
        }
        const auto nb = index.neighbors(s, 0);
        layer0[s].assign(nb.begin(), nb.end());
    }
    EXPECT_EQ(testing::reachable(layer0, index.entry_point()), items.size());
    EXPECT_EQ(index.level(index.entry_point()), index.max_level());
}

TEST(Hnsw, LevelDistributionIsGeometric) {
    // P(level >= l) = exp(-l / m_L); with M = 16, P(level >= 1) = 1/16.
    const auto items = uniform_store(50000, 2, 34);
    HnswParams params;
    params.ef_construction = 16;
    const auto index = HnswIndex::build(items, params);
    std::size_t above = 0;
    std::size_t above2 = 0;
    for (std::uint32_t s = 0; s < items.size(); ++s) {
        above += index.level(s) >= 1;
        above2 += index.level(s) >= 2;
    }
    const double n = static_cast<double>(items.size());
    EXPECT_NEAR(static_cast<double>(above) / n, 1.0 / 16.0, 0.005);
    EXPECT_NEAR(static_cast<double>(above2) / n, 1.0 / 256.0, 0.001);
}

TEST(Hnsw, DeterministicForSeed) {
    const auto items = uniform_store(2000, 4, 35);
    const auto a = HnswIndex::build(items);
    const auto b = HnswIndex::build(items);
    for (const auto& q : uniform_queries(20, 4, 36)) {
        ASSERT_EQ(a.search(q, 10), b.search(q, 10));
    }
}

TEST(Hnsw, IncrementalInsertAndErrors) {
    HnswIndex index(Representation::raw, 2);
    EXPECT_TRUE(index.search(std::vector<double>{0, 0}, 3).empty());
    index.insert({1, 1, 0}, std::vector<double>{0, 0});
    index.insert({2, 2, 0}, std::vector<double>{1, 1});
    EXPECT_EQ(kind_of([&] { index.insert({2, 3, 0}, std::vector<double>{2, 2}); }), ErrorKind::duplicate_id);
    EXPECT_EQ(kind_of([&] { index.insert({4, 3, 0}, std::vector<double>{2}); }), ErrorKind::dimension_mismatch);
    const auto r = index.search(std::vector<double>{0.9, 0.9}, 5);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].item_id, 2);
}

TEST(HnswParams, Validation) {
    HnswParams p;
    p.max_neighbors = 1;
    EXPECT_EQ(kind_of([&] { p.validate(); }), ErrorKind::invalid_argument);
    HnswParams q;
    EXPECT_NEAR(q.resolved_level_mult(), 1.0 / std::log(16.0), 1e-15);
}

}  // namespace
}  // namespace proxtrace::ann
