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

#include "proxtrace/ann/item_store.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "proxtrace/ann/index.hpp"
#include "proxtrace/error.hpp"

namespace proxtrace::ann {

std::string_view
to_string(Backend backend) noexcept {
    switch (backend) {
        case Backend::brute:
            return "brute";
        case Backend::kd:
            return "kd";
        case Backend::hnsw:
            return "hnsw";
    }
    return "unknown";
}

std::string_view
to_string(Representation representation) noexcept {
    return representation == Representation::raw ? "raw" : "encoded";
}

Backend
parse_backend(std::string_view name) {
    if (name == "brute") {
        return Backend::brute;
    }
    if (name == "kd") {
        return Backend::kd;
    }
    if (name == "hnsw") {
        return Backend::hnsw;
    }
    throw Error(ErrorKind::invalid_argument, "unknown backend '" + std::string(name) + "'");
}

ItemStore::ItemStore(Representation representation, std::size_t dim) : representation_(representation), dim_(dim) {
    if (dim == 0) {
        throw Error(ErrorKind::invalid_argument, "item dimension must be >= 1");
    }
}

void
ItemStore::reserve(std::size_t n) {
    infos_.reserve(n);
    data_.reserve(n * dim_);
}

void
ItemStore::add(const ItemInfo& info, std::span<const double> vector) {
    if (vector.size() != dim_) {
        throw Error(ErrorKind::dimension_mismatch,
                    "item vector has length " + std::to_string(vector.size()) + ", store expects " +
                        std::to_string(dim_));
    }
    for (double c : vector) {
        if (!std::isfinite(c)) {
            throw Error(ErrorKind::invalid_argument, "item vector has a non-finite component");
        }
        if (representation_ == Representation::encoded &&
            (c < 0.0 || c != std::floor(c) || c > static_cast<double>(std::numeric_limits<Cell>::max()))) {
            throw Error(ErrorKind::invalid_argument, "encoded item has a non-cell component");
        }
    }
    infos_.push_back(info);
    data_.insert(data_.end(), vector.begin(), vector.end());
}

void
ItemStore::add(const ItemInfo& info, const EncodedPoint& point) {
    if (representation_ != Representation::encoded) {
        throw Error(ErrorKind::representation_mismatch, "encoded point added to a raw store");
    }
    const auto q = to_query(point);
    add(info, q);
}

void
ItemStore::check_unique_ids() const {
    std::vector<std::int64_t> ids;
    ids.reserve(infos_.size());
    for (const auto& info : infos_) {
        ids.push_back(info.item_id);
    }
    std::sort(ids.begin(), ids.end());
    const auto dup = std::adjacent_find(ids.begin(), ids.end());
    if (dup != ids.end()) {
        throw Error(ErrorKind::duplicate_id, "duplicate item_id " + std::to_string(*dup));
    }
}

NeighborResult
ItemStore::result(std::size_t slot, double squared) const noexcept {
    const auto& info = infos_[slot];
    return {info.item_id, info.user_id, info.timestep, std::sqrt(squared)};
}

std::vector<double>
to_query(const EncodedPoint& point) {
    return {point.cells.begin(), point.cells.end()};
}

void
NeighborIndex::check_query(std::span<const double> query, std::size_t k) const {
    if (query.size() != items_.dim()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "query has length " + std::to_string(query.size()) + ", index dimension is " +
                        std::to_string(items_.dim()));
    }
    if (k == 0) {
        throw Error(ErrorKind::invalid_argument, "k must be >= 1");
    }
}

std::vector<NeighborResult>
NeighborIndex::to_results(const std::vector<detail::Candidate>& found) const {
    std::vector<NeighborResult> out;
    out.reserve(found.size());
    for (const auto& c : found) {
        out.push_back(items_.result(c.slot, c.dist2));
    }
    return out;
}

std::vector<NeighborResult>
NeighborIndex::search(std::span<const double> query, std::size_t k) const {
    check_query(query, k);
    if (items_.empty()) {
        return {};
    }
    return to_results(search_impl(query.data(), k));
}

}  // namespace proxtrace::ann
