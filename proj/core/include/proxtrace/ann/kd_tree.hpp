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
#include <limits>
#include <span>
#include <vector>

#include "proxtrace/ann/index.hpp"

namespace proxtrace::ann {

struct KdOptions {
    /// Upper bound on nodes examined per query. 0 keeps the search exact.
    std::size_t max_visits = 0;
};

/// Median-split KD-tree with exact branch-and-bound search.
///
/// Every node holds one item. The discriminator at depth h is h mod K. Items
/// at each level are ordered by (coordinate, item_id) and the lower median
/// becomes the node, so the tree is balanced with height floor(log2 N) + 1
/// regardless of duplicate coordinates.
class KdTree final : public NeighborIndex {
 public:
    static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

    struct Node {
        std::uint32_t slot;
        std::uint32_t discriminator;
        std::uint32_t left;
        std::uint32_t right;

        bool
        operator==(const Node&) const = default;
    };

    /// Throws Error(invalid_argument) on an empty store and
    /// Error(duplicate_id) on repeated item ids.
    explicit KdTree(ItemStore items, KdOptions options = {});
    KdTree(KdTree&&) = default;

    Backend
    backend() const noexcept override {
        return Backend::kd;
    }

    /// Nodes in preorder; the root is node 0.
    std::span<const Node>
    nodes() const noexcept {
        return nodes_;
    }

    std::size_t
    height() const noexcept;

    const KdOptions&
    options() const noexcept {
        return options_;
    }

 private:
    KdTree(ItemStore items, KdOptions options, std::vector<Node> nodes);

    std::uint32_t
    build(std::vector<std::uint32_t>& order, std::size_t lo, std::size_t hi, std::size_t depth);

    void
    cache_coords();

    std::vector<detail::Candidate>
    search_impl(const double* query, std::size_t k) const override;

    KdOptions options_;
    std::vector<Node> nodes_;
    // Node-ordered copy of the item vectors; keeps traversal cache-local.
    std::vector<double> node_coords_;

    friend class IndexSerializer;
};

}  // namespace proxtrace::ann
