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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_set>
#include <vector>

#include "proxtrace/ann/index.hpp"
#include "proxtrace/rng.hpp"

namespace proxtrace::ann {

struct HnswParams {
    /// Neighbours linked per inserted node and the degree cap on upper
    /// layers; layer 0 allows twice as many.
    std::size_t max_neighbors = 16;
    std::size_t ef_construction = 200;
    /// Default candidate pool for search(query, k); raised to k when smaller.
    std::size_t ef_search = 100;
    /// Level normalization m_L. Zero selects 1 / ln(max_neighbors).
    double level_mult = 0.0;
    std::uint64_t seed = 100;

    double
    resolved_level_mult() const;

    void
    validate() const;
};

/// Hierarchical navigable small-world graph.
///
/// Nodes are inserted one at a time. Each draws a top level
/// l = floor(-ln(U) * m_L), descends greedily (pool of one) through the layers
/// above l, then on every layer from l down to 0 collects ef_construction
/// candidates and links to the closest max_neighbors of them. A neighbour
/// pushed past its degree cap keeps only its closest links.
class HnswIndex final : public NeighborIndex {
 public:
    static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

    HnswIndex(Representation representation, std::size_t dim, HnswParams params = {});
    HnswIndex(HnswIndex&& other) noexcept;

    /// Inserts every item of `items` in slot order.
    static HnswIndex
    build(const ItemStore& items, HnswParams params = {});

    /// Throws Error(duplicate_id) for a repeated item_id and
    /// Error(dimension_mismatch) for a wrong-length vector.
    void
    insert(const ItemInfo& info, std::span<const double> vector);

    Backend
    backend() const noexcept override {
        return Backend::hnsw;
    }

    using NeighborIndex::search;

    /// Search with an explicit candidate pool (raised to k when smaller).
    std::vector<NeighborResult>
    search(std::span<const double> query, std::size_t k, std::size_t ef) const;

    const HnswParams&
    params() const noexcept {
        return params_;
    }

    /// Changes the default pool used by search(query, k). Not thread-safe;
    /// call before handing the index to readers.
    void
    set_ef_search(std::size_t ef);

    int
    max_level() const noexcept {
        return max_level_;
    }
    std::uint32_t
    entry_point() const noexcept {
        return entry_;
    }
    int
    level(std::uint32_t slot) const noexcept {
        return levels_[slot];
    }

    std::size_t
    degree_cap(int layer) const noexcept {
        return layer == 0 ? 2 * params_.max_neighbors : params_.max_neighbors;
    }

    /// Adjacency of `slot` on `layer` (which must not exceed level(slot)).
    std::span<const std::uint32_t>
    neighbors(std::uint32_t slot, int layer) const noexcept;

 private:
    class VisitedPool {
     public:
        struct List {
            std::vector<std::uint32_t> marks;
            std::uint32_t epoch = 0;

            /// Starts a fresh traversal; clears the marks only on wrap-around.
            void
            advance() {
                if (++epoch == 0) {
                    std::fill(marks.begin(), marks.end(), 0U);
                    epoch = 1;
                }
            }
        };

        VisitedPool() = default;
        VisitedPool(VisitedPool&& other) noexcept;

        std::unique_ptr<List>
        acquire(std::size_t n);
        void
        release(std::unique_ptr<List> list);

     private:
        std::mutex mutex_;
        std::vector<std::unique_ptr<List>> free_;
    };

    struct Lease;

    int
    draw_level();

    std::uint32_t*
    link_block(std::uint32_t slot, int layer) noexcept;

    std::uint32_t
    greedy_closest(const double* query, std::uint32_t start, int layer) const;

    std::vector<detail::Candidate>
    search_layer(const double* query,
                 const std::vector<detail::Candidate>& entries,
                 std::size_t ef,
                 int layer,
                 VisitedPool::List& visited) const;

    void
    add_link(std::uint32_t from, std::uint32_t to, int layer);

    detail::Candidate
    candidate(std::uint32_t slot, const double* query) const noexcept {
        return {items_.squared_distance(slot, query), items_.info(slot).item_id, slot};
    }

    std::vector<detail::Candidate>
    search_impl(const double* query, std::size_t k) const override;

    std::vector<detail::Candidate>
    search_candidates(const double* query, std::size_t k, std::size_t ef) const;

    HnswParams params_;
    double level_mult_;
    Rng rng_;
    std::vector<int> levels_;
    // Layer 0 adjacency, one fixed block per node: [count, slot...].
    std::vector<std::uint32_t> links0_;
    // Layers 1..level per node, concatenated fixed blocks [count, slot...].
    std::vector<std::vector<std::uint32_t>> upper_links_;
    std::uint32_t entry_ = kNone;
    int max_level_ = -1;
    std::unordered_set<std::int64_t> ids_;
    mutable VisitedPool visited_;

    friend class IndexSerializer;
};

}  // namespace proxtrace::ann
