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

#include "proxtrace/ann/hnsw.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "proxtrace/error.hpp"

namespace proxtrace::ann {

namespace {

constexpr int kMaxLevel = 48;

}  // namespace

double
HnswParams::resolved_level_mult() const {
    return level_mult > 0.0 ? level_mult : 1.0 / std::log(static_cast<double>(max_neighbors));
}

void
HnswParams::validate() const {
    if (max_neighbors < 2) {
        throw Error(ErrorKind::invalid_argument, "hnsw max_neighbors must be >= 2");
    }
    if (ef_construction < 1 || ef_search < 1) {
        throw Error(ErrorKind::invalid_argument, "hnsw ef parameters must be >= 1");
    }
    if (!std::isfinite(level_mult) || level_mult < 0.0) {
        throw Error(ErrorKind::invalid_argument, "hnsw level multiplier must be finite and non-negative");
    }
}

HnswIndex::VisitedPool::VisitedPool(VisitedPool&& other) noexcept {
    std::lock_guard lock(other.mutex_);
    free_ = std::move(other.free_);
}

std::unique_ptr<HnswIndex::VisitedPool::List>
HnswIndex::VisitedPool::acquire(std::size_t n) {
    std::unique_ptr<List> list;
    {
        std::lock_guard lock(mutex_);
        if (!free_.empty()) {
            list = std::move(free_.back());
            free_.pop_back();
        }
    }
    if (!list) {
        list = std::make_unique<List>();
    }
    if (list->marks.size() < n) {
        list->marks.resize(n, 0);
    }
    list->advance();
    return list;
}

void
HnswIndex::VisitedPool::release(std::unique_ptr<List> list) {
    std::lock_guard lock(mutex_);
    free_.push_back(std::move(list));
}

struct HnswIndex::Lease {
    VisitedPool& pool;
    std::unique_ptr<VisitedPool::List> list;

    Lease(VisitedPool& p, std::size_t n) : pool(p), list(p.acquire(n)) {
    }
    ~Lease() {
        pool.release(std::move(list));
    }
    Lease(const Lease&) = delete;
    Lease&
    operator=(const Lease&) = delete;
};

HnswIndex::HnswIndex(Representation representation, std::size_t dim, HnswParams params)
    : NeighborIndex(ItemStore(representation, dim)),
      params_(params),
      level_mult_(0.0),
      rng_(params.seed) {
    params_.validate();
    level_mult_ = params_.resolved_level_mult();
}

HnswIndex::HnswIndex(HnswIndex&& other) noexcept
    : NeighborIndex(std::move(other)),
      params_(other.params_),
      level_mult_(other.level_mult_),
      rng_(std::move(other.rng_)),
      levels_(std::move(other.levels_)),
      links0_(std::move(other.links0_)),
      upper_links_(std::move(other.upper_links_)),
      entry_(other.entry_),
      max_level_(other.max_level_),
      ids_(std::move(other.ids_)),
      visited_(std::move(other.visited_)) {
}

HnswIndex
HnswIndex::build(const ItemStore& items, HnswParams params) {
    HnswIndex index(items.representation(), items.dim(), params);
    index.items_.reserve(items.size());
    index.levels_.reserve(items.size());
    index.links0_.reserve(items.size() * (1 + index.degree_cap(0)));
    index.upper_links_.reserve(items.size());
    for (std::size_t slot = 0; slot < items.size(); ++slot) {
        index.insert(items.info(slot), items.vector(slot));
    }
    return index;
}

void
HnswIndex::set_ef_search(std::size_t ef) {
    if (ef < 1) {
        throw Error(ErrorKind::invalid_argument, "ef_search must be >= 1");
    }
    params_.ef_search = ef;
}

int
HnswIndex::draw_level() {
    // 1 - U lies in (0, 1], keeping the logarithm finite.
    const double u = 1.0 - rng_.uniform01();
    const double level = std::floor(-std::log(u) * level_mult_);
    return static_cast<int>(std::min(level, static_cast<double>(kMaxLevel)));
}

std::uint32_t*
HnswIndex::link_block(std::uint32_t slot, int layer) noexcept {
    if (layer == 0) {
        return links0_.data() + static_cast<std::size_t>(slot) * (1 + degree_cap(0));
    }
    return upper_links_[slot].data() + static_cast<std::size_t>(layer - 1) * (1 + params_.max_neighbors);
}

std::span<const std::uint32_t>
HnswIndex::neighbors(std::uint32_t slot, int layer) const noexcept {
    const std::uint32_t* block = layer == 0
                                     ? links0_.data() + static_cast<std::size_t>(slot) * (1 + degree_cap(0))
                                     : upper_links_[slot].data() +
                                           static_cast<std::size_t>(layer - 1) * (1 + params_.max_neighbors);
    return {block + 1, block[0]};
}

std::uint32_t
HnswIndex::greedy_closest(const double* query, std::uint32_t start, int layer) const {
    auto best = candidate(start, query);
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::uint32_t next : neighbors(best.slot, layer)) {
            const auto c = candidate(next, query);
            if (detail::closer(c, best)) {
                best = c;
                moved = true;
            }
        }
    }
    return best.slot;
}

std::vector<detail::Candidate>
HnswIndex::search_layer(const double* query,
                        const std::vector<detail::Candidate>& entries,
                        std::size_t ef,
                        int layer,
                        VisitedPool::List& visited) const {
    std::priority_queue<detail::Candidate, std::vector<detail::Candidate>, detail::Farther> frontier;
    std::priority_queue<detail::Candidate, std::vector<detail::Candidate>, detail::Closer> found;
    const std::uint32_t epoch = visited.epoch;
    for (const auto& e : entries) {
        if (visited.marks[e.slot] == epoch) {
            continue;
        }
        visited.marks[e.slot] = epoch;
        frontier.push(e);
        found.push(e);
        if (found.size() > ef) {
            found.pop();
        }
    }
    while (!frontier.empty()) {
        const auto current = frontier.top();
        if (found.size() >= ef && detail::closer(found.top(), current)) {
            break;
        }
        frontier.pop();
        for (std::uint32_t next : neighbors(current.slot, layer)) {
            if (visited.marks[next] == epoch) {
                continue;
            }
            visited.marks[next] = epoch;
            const auto c = candidate(next, query);
            if (found.size() < ef || detail::closer(c, found.top())) {
                frontier.push(c);
                found.push(c);
                if (found.size() > ef) {
                    found.pop();
                }
            }
        }
    }
    std::vector<detail::Candidate> out(found.size());
    for (std::size_t i = out.size(); i > 0; --i) {
        out[i - 1] = found.top();
        found.pop();
    }
    return out;
}

void
HnswIndex::add_link(std::uint32_t from, std::uint32_t to, int layer) {
    std::uint32_t* block = link_block(from, layer);
    const std::size_t cap = degree_cap(layer);
    if (block[0] < cap) {
        block[1 + block[0]] = to;
        ++block[0];
        return;
    }
    const double* origin = items_.vector_ptr(from);
    std::vector<detail::Candidate> pool;
    pool.reserve(cap + 1);
    for (std::size_t i = 0; i < block[0]; ++i) {
        pool.push_back(candidate(block[1 + i], origin));
    }
    pool.push_back(candidate(to, origin));
    std::sort(pool.begin(), pool.end(), detail::Closer{});
    for (std::size_t i = 0; i < cap; ++i) {
        block[1 + i] = pool[i].slot;
    }
    block[0] = static_cast<std::uint32_t>(cap);
}

void
HnswIndex::insert(const ItemInfo& info, std::span<const double> vector) {
    if (vector.size() != items_.dim()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "hnsw insert of a " + std::to_string(vector.size()) + "-d vector into a " +
                        std::to_string(items_.dim()) + "-d graph");
    }
    if (items_.size() + 1 >= kNone) {
        throw Error(ErrorKind::invalid_argument, "hnsw graph is full");
    }
    if (!ids_.insert(info.item_id).second) {
        throw Error(ErrorKind::duplicate_id, "duplicate item_id " + std::to_string(info.item_id));
    }
    try {
        items_.add(info, vector);
    } catch (...) {
        ids_.erase(info.item_id);
        throw;
    }

    const auto slot = static_cast<std::uint32_t>(items_.size() - 1);
    const int level = draw_level();
    levels_.push_back(level);
    links0_.resize(links0_.size() + 1 + degree_cap(0), 0U);
    upper_links_.emplace_back(static_cast<std::size_t>(level) * (1 + params_.max_neighbors), 0U);

    if (entry_ == kNone) {
        entry_ = slot;
        max_level_ = level;
        return;
    }

    const double* query = items_.vector_ptr(slot);
    std::uint32_t current = entry_;
    for (int layer = max_level_; layer > level; --layer) {
        current = greedy_closest(query, current, layer);
    }

    Lease lease(visited_, items_.size());
    std::vector<detail::Candidate> entries{candidate(current, query)};
    for (int layer = std::min(level, max_level_); layer >= 0; --layer) {
        if (layer != std::min(level, max_level_)) {
            lease.list->advance();
        }
        auto found = search_layer(query, entries, params_.ef_construction, layer, *lease.list);
        const std::size_t keep = std::min(params_.max_neighbors, found.size());
        std::uint32_t* block = link_block(slot, layer);
        block[0] = static_cast<std::uint32_t>(keep);
        for (std::size_t i = 0; i < keep; ++i) {
            block[1 + i] = found[i].slot;
        }
        for (std::size_t i = 0; i < keep; ++i) {
            add_link(found[i].slot, slot, layer);
        }
        entries = std::move(found);
    }

    if (level > max_level_) {
        max_level_ = level;
        entry_ = slot;
    }
}

std::vector<detail::Candidate>
HnswIndex::search_candidates(const double* query, std::size_t k, std::size_t ef) const {
    std::uint32_t current = entry_;
    for (int layer = max_level_; layer > 0; --layer) {
        current = greedy_closest(query, current, layer);
    }
    Lease lease(visited_, items_.size());
    auto found = search_layer(query, {candidate(current, query)}, std::max(ef, k), 0, *lease.list);
    if (found.size() > k) {
        found.resize(k);
    }
    return found;
}

std::vector<detail::Candidate>
HnswIndex::search_impl(const double* query, std::size_t k) const {
    return search_candidates(query, k, params_.ef_search);
}

std::vector<NeighborResult>
HnswIndex::search(std::span<const double> query, std::size_t k, std::size_t ef) const {
    check_query(query, k);
    if (items_.empty()) {
        return {};
    }
    return to_results(search_candidates(query.data(), k, ef));
}

}  // namespace proxtrace::ann
