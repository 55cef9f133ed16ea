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
#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "proxtrace/ann/hnsw.hpp"
#include "proxtrace/ann/index.hpp"
#include "proxtrace/ann/kd_tree.hpp"
#include "proxtrace/encoder.hpp"
#include "proxtrace/trajectory.hpp"

namespace proxtrace {

struct EncodingParams {
    std::size_t p = 16;
    std::uint32_t intervals = 128;
    std::uint64_t seed = 13;

    bool
    operator==(const EncodingParams&) const = default;
};

struct ExperimentConfig {
    /// Free-form name echoed in result tables.
    std::string dataset_label = "dataset";
    ann::Backend backend = ann::Backend::kd;
    /// Absent means the index holds raw space-time points.
    std::optional<EncodingParams> encoding;
    double infected_fraction = 0.01;
    /// Neighbours retrieved per infected-user sample.
    std::size_t r = 100;
    /// Keep only the k_final users with the smallest observed distance.
    std::optional<std::size_t> k_final;
    std::uint64_t query_seed = 42;
    /// Sample infected users with a non-empty ground truth first.
    bool evaluable_only = true;
    ann::HnswParams hnsw;
    ann::KdOptions kd;
    /// Also time brute-force search on the same queries.
    bool measure_exhaustive = false;
    /// Queries used for the exhaustive timing, spread evenly over the
    /// battery; 0 uses all of them.
    std::size_t exhaustive_queries = 200;
    std::size_t threads = 1;

    void
    validate() const;
};

/// ceil(fraction * n) users drawn without replacement from the real
/// population, returned in ascending order. Throws Error(invalid_argument) on
/// an empty dataset or a fraction outside (0, 1].
std::vector<UserId>
select_infected(const Dataset& dataset, double fraction, std::uint64_t seed, bool evaluable_only = true);

/// One item per sample; item ids run over users then timesteps in order.
/// With an encoder the store holds encoded cells.
ann::ItemStore
make_item_store(const Dataset& dataset, const EncodingModel* encoder = nullptr);

std::unique_ptr<ann::NeighborIndex>
build_index(ann::ItemStore items, ann::Backend backend, const ann::HnswParams& hnsw = {}, const ann::KdOptions& kd = {});

struct PreparedIndex {
    std::unique_ptr<ann::NeighborIndex> index;
    std::optional<EncodingModel> encoder;
    /// Encoder fitting plus index construction.
    double build_ms = 0.0;
};

/// Fits the encoder on every sample of the dataset when requested, then
/// builds the index.
PreparedIndex
prepare_index(const Dataset& dataset, const ExperimentConfig& config);

/// Union of the users among the r nearest items of each sample of
/// `infected`, without the infected user. Throws
/// Error(representation_mismatch) when the encoder presence disagrees with
/// the index representation.
std::set<UserId>
trace_one(const ann::NeighborIndex& index,
          const TrajectoryRecord& infected,
          std::size_t r,
          const EncodingModel* encoder = nullptr,
          std::optional<std::size_t> k_final = std::nullopt);

struct UserTrace {
    UserId user = 0;
    std::set<UserId> retrieved;
    std::size_t true_positives = 0;
    std::size_t truth_size = 0;
};

struct LatencyStats {
    std::size_t count = 0;
    double mean_ms = 0.0;
    double median_ms = 0.0;
};

LatencyStats
latency_stats(std::vector<double> samples_ms);

struct TraceResult {
    ExperimentConfig config;
    std::size_t infected = 0;
    std::vector<UserTrace> users;
    /// Pooled true positives over pooled ground truth.
    double recall = 0.0;
    /// Mean of per-user recall over users with a non-empty ground truth.
    double macro_recall = 0.0;
    std::size_t evaluable_users = 0;
    /// Index search only.
    LatencyStats index_latency;
    /// Encoding of the query sample plus index search.
    LatencyStats e2e_latency;
    double total_wall_ms = 0.0;
    double build_ms = 0.0;
    std::optional<double> exhaustive_median_ms;
    std::optional<double> speedup;
    /// Failed self-checks, empty when all passed.
    std::vector<std::string> check_failures;
};

/// Runs every infected user against a prepared index.
TraceResult
evaluate(const Dataset& dataset, const PreparedIndex& prepared, const ExperimentConfig& config);

/// Builds the index and evaluates.
TraceResult
evaluate(const Dataset& dataset, const ExperimentConfig& config);

enum class SweepAxis {
    r,
    p,
    intervals,
    infected_fraction,
};

SweepAxis
parse_sweep_axis(std::string_view name);

std::string_view
to_string(SweepAxis axis) noexcept;

struct SweepPoint {
    double value = 0.0;
    std::optional<TraceResult> result;
    /// Set when this point failed; the sweep goes on.
    std::string error;
};

/// The index is built once for the r and infected_fraction axes and rebuilt
/// per value otherwise. Sweeping p or intervals on a raw config uses the
/// default EncodingParams for the other field.
std::vector<SweepPoint>
sweep(const Dataset& dataset, const ExperimentConfig& base, SweepAxis axis, const std::vector<double>& values);

/// Fixed-width table with dataset, #infected, p, M, r, time (ms) and recall.
void
write_table_header(std::ostream& out);

void
write_table_row(std::ostream& out, const TraceResult& result);

/// Tidy rows: dataset,backend,p,M,r,infected_fraction,metric,value.
void
write_tidy_header(std::ostream& out);

void
write_tidy_rows(std::ostream& out, const TraceResult& result);

}  // namespace proxtrace
