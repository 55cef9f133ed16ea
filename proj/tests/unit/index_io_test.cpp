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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "oracles.hpp"
#include "proxtrace/ann/brute_force.hpp"
#include "proxtrace/ann/hnsw.hpp"
#include "proxtrace/ann/index_io.hpp"
#include "proxtrace/ann/kd_tree.hpp"
#include "proxtrace/error.hpp"

namespace proxtrace::ann {
namespace {

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

std::vector<std::unique_ptr<NeighborIndex>>
all_backends(const ItemStore& items) {
    std::vector<std::unique_ptr<NeighborIndex>> out;
    out.push_back(std::make_unique<BruteForceIndex>(items));
    out.push_back(std::make_unique<KdTree>(items, KdOptions{0}));
    HnswParams p;
    p.max_neighbors = 8;
    p.ef_search = 40;
    out.push_back(std::make_unique<HnswIndex>(HnswIndex::build(items, p)));
    return out;
}

TEST(IndexIo, RoundTripAnswersIdentically) {
    const auto items = uniform_store(1500, 4, 40, 10.0, 3);
    const auto queries = uniform_queries(30, 4, 41, 10.0);
    for (const auto& index : all_backends(items)) {
        const auto bytes = serialize_index(*index);
        const auto back = deserialize_index(bytes);
        ASSERT_EQ(back->backend(), index->backend());
        ASSERT_EQ(back->size(), index->size());
        ASSERT_EQ(back->dim(), index->dim());
        for (const auto& q : queries) {
            ASSERT_EQ(back->search(q, 15), index->search(q, 15));
        }
        // Serialization of the restored index is byte-identical.
        EXPECT_EQ(serialize_index(*back), bytes);
    }
}

TEST(IndexIo, RestoredHnswKeepsGrowingIdentically) {
    const auto items = uniform_store(600, 3, 42);
    auto a = HnswIndex::build(items);
    auto restored = deserialize_index(serialize_index(a));
    auto& b = dynamic_cast<HnswIndex&>(*restored);
    const auto extra = uniform_store(50, 3, 43);
    for (std::size_t i = 0; i < extra.size(); ++i) {
        const ItemInfo info{1000 + static_cast<std::int64_t>(i), 0, 0};
        a.insert(info, extra.vector(i));
        b.insert(info, extra.vector(i));
    }
    EXPECT_EQ(serialize_index(a), serialize_index(b));
}

TEST(IndexIo, EncodedRepresentationSurvives) {
    ItemStore items(Representation::encoded, 3);
    for (std::int64_t i = 0; i < 100; ++i) {
        items.add({i, i, 0}, EncodedPoint{{static_cast<Cell>(i), static_cast<Cell>(i % 7), 1000000}});
    }
    const KdTree tree(items);
    const auto back = deserialize_index(serialize_index(tree));
    EXPECT_EQ(back->representation(), Representation::encoded);
    EXPECT_EQ(back->items().vector(42)[2], 1000000.0);
}

TEST(IndexIo, DetectsCorruption) {
    const auto items = uniform_store(200, 4, 44);
    const KdTree tree(items);
    auto bytes = serialize_index(tree);

    auto flipped = bytes;
    flipped[bytes.size() / 2] ^= 0x10;
    EXPECT_EQ(kind_of([&] { (void)deserialize_index(flipped); }), ErrorKind::format);

    auto truncated = bytes;
    truncated.resize(bytes.size() - 9);
    EXPECT_EQ(kind_of([&] { (void)deserialize_index(truncated); }), ErrorKind::format);

    auto bad_magic = bytes;
    bad_magic[0] = 'Q';
    EXPECT_EQ(kind_of([&] { (void)deserialize_index(bad_magic); }), ErrorKind::format);

    auto future = bytes;
    future[8] = 7;
    EXPECT_EQ(kind_of([&] { (void)deserialize_index(future); }), ErrorKind::version);
}

TEST(IndexIo, FileRoundTripAndMissingFile) {
    const auto items = uniform_store(300, 4, 45);
    const BruteForceIndex index(items);
    const auto path = std::filesystem::temp_directory_path() / "proxtrace_index_io_test.idx";
    save_index(index, path);
    const auto back = load_index(path);
    EXPECT_EQ(serialize_index(*back), serialize_index(index));
    std::filesystem::remove(path);
    EXPECT_EQ(kind_of([&] { (void)load_index(path); }), ErrorKind::io);
}

}  // namespace
}  // namespace proxtrace::ann
