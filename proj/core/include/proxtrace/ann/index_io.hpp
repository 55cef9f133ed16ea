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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "proxtrace/ann/index.hpp"

namespace proxtrace::ann {

// Index file format, version 1. All integers little-endian.
//
//   offset  size  field
//   0       8     magic "PXTINDEX"
//   8       4     u32 format version (1)
//   12      1     u8 backend        (0 brute, 1 kd, 2 hnsw)
//   13      1     u8 representation (0 raw, 1 encoded)
//   14      2     reserved, zero
//   16      4     u32 dimension
//   20      8     u64 item count N
//   28      ...   N items: i64 item_id, i64 user_id, u32 timestep
//           ...   N * dimension components: f64 (raw) or u32 cells (encoded)
//           ...   backend payload
//           8     u64 FNV-1a checksum of every preceding byte
//
// Backend payloads:
//   brute  nothing
//   kd     u64 max_visits, u64 node count, nodes as 4 x u32
//          (slot, discriminator, left, right; 0xFFFFFFFF = no child)
//   hnsw   u64 max_neighbors, u64 ef_construction, u64 ef_search,
//          f64 level_mult, u64 seed, u32 length + generator state text,
//          i32 max_level, u32 entry point, then per node: i32 level and for
//          each layer 0..level a u32 count followed by that many u32 slots.

inline constexpr std::uint32_t kIndexFormatVersion = 1;

std::vector<std::uint8_t>
serialize_index(const NeighborIndex& index);

/// Throws Error(format) for a damaged or truncated buffer and
/// Error(version) for an unknown format version.
std::unique_ptr<NeighborIndex>
deserialize_index(std::span<const std::uint8_t> bytes);

/// Throws Error(io) when the file cannot be written.
void
save_index(const NeighborIndex& index, const std::filesystem::path& path);

/// Throws Error(io) when the file cannot be read, plus the errors of
/// deserialize_index.
std::unique_ptr<NeighborIndex>
load_index(const std::filesystem::path& path);

}  // namespace proxtrace::ann
