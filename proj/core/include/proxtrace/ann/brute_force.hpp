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

#include "proxtrace/ann/index.hpp"

namespace proxtrace::ann {

/// Exhaustive scan: the k smallest-distance items (all of them when k exceeds
/// the collection), ascending, ties by item_id. An empty collection yields an
/// empty list.
std::vector<NeighborResult>
brute_force_knn(std::span<const double> query, std::size_t k, const ItemStore& items);

class BruteForceIndex final : public NeighborIndex {
 public:
    explicit BruteForceIndex(ItemStore items);
    BruteForceIndex(BruteForceIndex&&) = default;

    Backend
    backend() const noexcept override {
        return Backend::brute;
    }

 private:
    std::vector<detail::Candidate>
    search_impl(const double* query, std::size_t k) const override;
};

}  // namespace proxtrace::ann
