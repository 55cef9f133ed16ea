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


// Independent reference implementations used to check the library. They are
// written for clarity, not speed, and share no code with core/.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <queue>
#include <span>
#include <tuple>
#include <vector>

#include "proxtrace/ann/item_store.hpp"
#include "proxtrace/rng.hpp"

namespace proxtrace::testing {

/// Exhaustive k-NN: sort every item by (squared distance, item_id).
inline std::vector<ann::NeighborResult>
naive_knn(std::span<const double> query, std::size_t k, const ann::ItemStore& items) {
    std::vector<std::tuple<double, std::int64_t, std::size_t>> all;
    all.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        double s = 0.0;
        const auto v = items.vector(i);
        for (std::size_t d = 0; d < query.size(); ++d) {
            s += (v[d] - query[d]) * (v[d] - query[d]);
        }
        all.emplace_back(s, items.info(i).item_id, i);
    }
    std::sort(all.begin(), all.end());
    all.resize(std::min(k, all.size()));
    std::vector<ann::NeighborResult> out;
    for (const auto& [s, id, slot] : all) {
        const auto& info = items.info(slot);
        out.push_back({id, info.user_id, info.timestep, std::sqrt(s)});
    }
    return out;
}

/// Ranks with ties averaged (1-based).
inline std::vector<double>
average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) {
            ++j;
        }
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) {
            ranks[order[t]] = r;
        }
        i = j + 1;
    }
    return ranks;
}

inline double
pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

inline double
spearman(const std::vector<double>& a, const std::vector<double>& b) {
    return pearson(average_ranks(a), average_ranks(b));
}

/// Nodes reachable from `start` in an adjacency list.
inline std::size_t
reachable(const std::vector<std::vector<std::uint32_t>>& adjacency, std::uint32_t start) {
    std::vector<bool> seen(adjacency.size(), false);
    std::queue<std::uint32_t> q;
    q.push(start);
    seen[start] = true;
    std::size_t n = 1;
    while (!q.empty()) {
        const auto u = q.front();
        q.pop();
        for (auto v : adjacency[u]) {
            if (!seen[v]) {
                seen[v] = true;
                ++n;
                q.push(v);
            }
        }
    }
    return n;
}

/// n uniform points in [0, edge)^dim stored with item_id = index and
/// user_id = index / per_user.
inline ann::ItemStore
uniform_store(std::size_t n, std::size_t dim, std::uint64_t seed, double edge = 1.0, std::size_t per_user = 1) {
    Rng rng(seed);
    ann::ItemStore items(ann::Representation::raw, dim);
    items.reserve(n);
    std::vector<double> v(dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& c : v) {
            c = rng.uniform(0.0, edge);
        }
        items.add({static_cast<std::int64_t>(i), static_cast<std::int64_t>(i / per_user), 0}, v);
    }
    return items;
}

inline std::vector<std::vector<double>>
uniform_queries(std::size_t n, std::size_t dim, std::uint64_t seed, double edge = 1.0) {
    Rng rng(seed);
    std::vector<std::vector<double>> out(n, std::vector<double>(dim));
    for (auto& q : out) {
        for (auto& c : q) {
            c = rng.uniform(0.0, edge);
        }
    }
    return out;
}

/// Share of `truth` ids present in `found`.
inline double
overlap(const std::vector<ann::NeighborResult>& found, const std::vector<ann::NeighborResult>& truth) {
    std::size_t hit = 0;
    for (const auto& t : truth) {
        hit += static_cast<std::size_t>(std::any_of(
            found.begin(), found.end(), [&](const ann::NeighborResult& f) { return f.item_id == t.item_id; }));
    }
    return truth.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(truth.size());
}

}  // namespace proxtrace::testing
