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

#include "proxtrace/ann/brute_force.hpp"

#include <string>

#include "proxtrace/error.hpp"

namespace proxtrace::ann {

namespace {

std::vector<detail::Candidate>
scan(const ItemStore& items, const double* query, std::size_t k) {
    detail::TopK top(k);
    for (std::size_t slot = 0; slot < items.size(); ++slot) {
        top.offer({items.squared_distance(slot, query), items.info(slot).item_id, static_cast<std::uint32_t>(slot)});
    }
    return std::move(top).sorted();
}

}  // namespace

std::vector<NeighborResult>
brute_force_knn(std::span<const double> query, std::size_t k, const ItemStore& items) {
    if (k == 0) {
        throw Error(ErrorKind::invalid_argument, "k must be >= 1");
    }
    if (items.empty()) {
        return {};
    }
    if (query.size() != items.dim()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "query has length " + std::to_string(query.size()) + ", items have " +
                        std::to_string(items.dim()));
    }
    std::vector<NeighborResult> out;
    for (const auto& c : scan(items, query.data(), k)) {
        out.push_back(items.result(c.slot, c.dist2));
    }
    return out;
}

BruteForceIndex::BruteForceIndex(ItemStore items) : NeighborIndex(std::move(items)) {
    items_.check_unique_ids();
}

std::vector<detail::Candidate>
BruteForceIndex::search_impl(const double* query, std::size_t k) const {
    return scan(items_, query, k);
}

}  // namespace proxtrace::ann
