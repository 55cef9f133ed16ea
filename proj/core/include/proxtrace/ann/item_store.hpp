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
#include <span>
#include <string_view>
#include <vector>

#include "proxtrace/encoder.hpp"
#include "proxtrace/geometry.hpp"

namespace proxtrace::ann {

enum class Backend : std::uint8_t {
    brute = 0,
    kd = 1,
    hnsw = 2,
};

enum class Representation : std::uint8_t {
    raw = 0,
    encoded = 1,
};

std::string_view
to_string(Backend backend) noexcept;
std::string_view
to_string(Representation representation) noexcept;

/// Throws Error(invalid_argument) for an unknown name.
Backend
parse_backend(std::string_view name);

/// Identity of one indexed point: a user's location at one timestep.
struct ItemInfo {
    std::int64_t item_id = 0;
    std::int64_t user_id = 0;
    std::uint32_t timestep = 0;

    bool
    operator==(const ItemInfo&) const = default;
};

struct NeighborResult {
    std::int64_t item_id = 0;
    std::int64_t user_id = 0;
    std::uint32_t timestep = 0;
    double distance = 0.0;

    bool
    operator==(const NeighborResult&) const = default;
};

/// Homogeneous row-major vector storage shared by every backend.
///
/// Encoded cells are held as doubles: cell indices below 2^26 square and sum
/// exactly in double precision, so the integer-cell L2 is computed without
/// rounding and ties between encoded points are exact.
class ItemStore {
 public:
    ItemStore(Representation representation, std::size_t dim);

    void
    reserve(std::size_t n);

    /// Throws Error(dimension_mismatch) on a wrong-length vector; for the
    /// encoded representation also Error(invalid_argument) unless every
    /// component is a non-negative integer.
    void
    add(const ItemInfo& info, std::span<const double> vector);

    void
    add(const ItemInfo& info, const EncodedPoint& point);

    Representation
    representation() const noexcept {
        return representation_;
    }
    std::size_t
    dim() const noexcept {
        return dim_;
    }
    std::size_t
    size() const noexcept {
        return infos_.size();
    }
    bool
    empty() const noexcept {
        return infos_.empty();
    }

    const ItemInfo&
    info(std::size_t slot) const noexcept {
        return infos_[slot];
    }
    std::span<const ItemInfo>
    infos() const noexcept {
        return infos_;
    }

    const double*
    vector_ptr(std::size_t slot) const noexcept {
        return data_.data() + slot * dim_;
    }
    std::span<const double>
    vector(std::size_t slot) const noexcept {
        return {vector_ptr(slot), dim_};
    }
    std::span<const double>
    data() const noexcept {
        return data_;
    }

    double
    squared_distance(std::size_t slot, const double* query) const noexcept {
        return squared_l2(vector_ptr(slot), query, dim_);
    }

    /// Throws Error(duplicate_id) if two items share an item_id.
    void
    check_unique_ids() const;

    NeighborResult
    result(std::size_t slot, double squared) const noexcept;

 private:
    Representation representation_;
    std::size_t dim_;
    std::vector<ItemInfo> infos_;
    std::vector<double> data_;
};

/// Converts encoded cells to the double query layout used by the indexes.
std::vector<double>
to_query(const EncodedPoint& point);

}  // namespace proxtrace::ann
