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


// Query latency of the three backends on uniform 4-d data, plus encoding
// throughput. Dataset size is the first range argument.

#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <vector>

#include "proxtrace/ann/brute_force.hpp"
#include "proxtrace/ann/hnsw.hpp"
#include "proxtrace/ann/kd_tree.hpp"
#include "proxtrace/encoder.hpp"
#include "proxtrace/rng.hpp"

namespace {

using namespace proxtrace;

ann::ItemStore
uniform_items(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    ann::ItemStore items(ann::Representation::raw, 4);
    items.reserve(n);
    std::vector<double> v(4);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& c : v) {
            c = rng.uniform(0.0, 100.0);
        }
        items.add({static_cast<std::int64_t>(i), static_cast<std::int64_t>(i), 0}, v);
    }
    return items;
}

std::vector<std::vector<double>>
queries(std::size_t n) {
    Rng rng(99);
    std::vector<std::vector<double>> out(n, std::vector<double>(4));
    for (auto& q : out) {
        for (auto& c : q) {
            c = rng.uniform(0.0, 100.0);
        }
    }
    return out;
}

// Indexes are cached across repetitions; HNSW builds dominate otherwise.
template <typename Make>
const ann::NeighborIndex&
cached(std::map<std::size_t, std::unique_ptr<ann::NeighborIndex>>& cache, std::size_t n, Make make) {
    auto& slot = cache[n];
    if (!slot) {
        slot = make(uniform_items(n, 7));
    }
    return *slot;
}

void
run_queries(benchmark::State& state, const ann::NeighborIndex& index) {
    const auto qs = queries(256);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(index.search(qs[i++ % qs.size()], 100));
    }
    state.SetItemsProcessed(state.iterations());
}

void
BM_BruteQuery(benchmark::State& state) {
    static std::map<std::size_t, std::unique_ptr<ann::NeighborIndex>> cache;
    run_queries(state, cached(cache, state.range(0), [](ann::ItemStore items) {
                    return std::make_unique<ann::BruteForceIndex>(std::move(items));
                }));
}

void
BM_KdQuery(benchmark::State& state) {
    static std::map<std::size_t, std::unique_ptr<ann::NeighborIndex>> cache;
    run_queries(state, cached(cache, state.range(0), [](ann::ItemStore items) {
                    return std::make_unique<ann::KdTree>(std::move(items));
                }));
}

void
BM_HnswQuery(benchmark::State& state) {
    static std::map<std::size_t, std::unique_ptr<ann::NeighborIndex>> cache;
    run_queries(state, cached(cache, state.range(0), [](ann::ItemStore items) {
                    return std::make_unique<ann::HnswIndex>(ann::HnswIndex::build(items));
                }));
}

void
BM_KdBuild(benchmark::State& state) {
    const auto items = uniform_items(state.range(0), 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ann::KdTree(items));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void
BM_Encode(benchmark::State& state) {
    Rng rng(3);
    std::vector<SpaceTimePoint> pts;
    for (int i = 0; i < 4096; ++i) {
        pts.emplace_back(rng.uniform(0, 100), rng.uniform(0, 100), rng.uniform(0, 100), rng.uniform(0, 200));
    }
    const auto model = EncodingModel::fit(pts, static_cast<std::size_t>(state.range(0)), 128, 5);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.encode(pts[i++ % pts.size()]));
    }
    state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK(BM_BruteQuery)->Arg(10000)->Arg(100000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_KdQuery)->Arg(10000)->Arg(100000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_HnswQuery)->Arg(10000)->Arg(100000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_KdBuild)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Encode)->Arg(4)->Arg(16)->Arg(64);

BENCHMARK_MAIN();
