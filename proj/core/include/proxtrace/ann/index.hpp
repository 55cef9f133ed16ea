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
#include <span>
#include <vector>

#include "proxtrace/ann/detail/candidate.hpp"
#include "proxtrace/ann/item_store.hpp"

namespace proxtrace::ann {

class IndexSerializer;

/// Common interface of the brute-force, KD-tree and HNSW backends.
///
/// An index is built by a single writer and is immutable afterwards; search()
/// is const and safe to call from any number of threads.
class NeighborIndex {
 public:
    virtual ~NeighborIndex() = default;

    NeighborIndex(const NeighborIndex&) = delete;
    NeighborIndex&
    operator=(const NeighborIndex&) = delete;

    virtual Backend
    backend() const noexcept = 0;

    const ItemStore&
    items() const noexcept {
        return items_;
    }
    Representation
    representation() const noexcept {
        return items_.representation();
    }
    std::size_t
    dim() const noexcept {
        return items_.dim();
    }
    std::size_t
    size() const noexcept {
        return items_.size();
    }

    /// At most k items sorted ascending by distance, ties by item_id.
    /// Throws Error(dimension_mismatch) when the query length differs from
    /// dim() and Error(invalid_argument) when k == 0.
    std::vector<NeighborResult>
    search(std::span<const double> query, std::size_t k) const;

 protected:
    explicit NeighborIndex(ItemStore items) : items_(std::move(items)) {
    }
    NeighborIndex(NeighborIndex&&) = default;

    void
    check_query(std::span<const double> query, std::size_t k) const;

    std::vector<NeighborResult>
    to_results(const std::vector<detail::Candidate>& found) const;

    virtual std::vector<detail::Candidate>
    search_impl(const double* query, std::size_t k) const = 0;

    ItemStore items_;

    friend class IndexSerializer;
};

}  // namespace proxtrace::ann
