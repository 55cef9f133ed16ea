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

#include "proxtrace/ann/kd_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "proxtrace/error.hpp"

namespace proxtrace::ann {

namespace {

struct SearchState {
    const double* query;
    std::size_t dim;
    detail::TopK top;
    // Per-axis lower bound on |query - point| for every point of the
    // subtree being visited.
    std::vector<double> offsets;
    std::size_t visits = 0;
    std::size_t max_visits = 0;
};

double
box_distance(const std::vector<double>& offsets) noexcept {
    double sum = 0.0;
    for (double o : offsets) {
        sum += o * o;
    }
    return sum;
}

}  // namespace

KdTree::KdTree(ItemStore items, KdOptions options) : NeighborIndex(std::move(items)), options_(options) {
    if (items_.empty()) {
        throw Error(ErrorKind::invalid_argument, "cannot build a KD-tree over an empty collection");
    }
    if (items_.size() >= kNone) {
        throw Error(ErrorKind::invalid_argument, "too many items for a KD-tree");
    }
    items_.check_unique_ids();
    std::vector<std::uint32_t> order(items_.size());
    std::iota(order.begin(), order.end(), 0U);
    nodes_.reserve(items_.size());
    build(order, 0, order.size(), 0);
    cache_coords();
}

KdTree::KdTree(ItemStore items, KdOptions options, std::vector<Node> nodes)
    : NeighborIndex(std::move(items)), options_(options), nodes_(std::move(nodes)) {
    cache_coords();
}

std::uint32_t
KdTree::build(std::vector<std::uint32_t>& order, std::size_t lo, std::size_t hi, std::size_t depth) {
    if (lo >= hi) {
        return kNone;
    }
    const auto axis = static_cast<std::uint32_t>(depth % items_.dim());
    const std::size_t mid = lo + (hi - lo - 1) / 2;
    const auto key_less = [&](std::uint32_t a, std::uint32_t b) {
        const double ka = items_.vector_ptr(a)[axis];
        const double kb = items_.vector_ptr(b)[axis];
        return ka < kb || (ka == kb && items_.info(a).item_id < items_.info(b).item_id);
    };
    std::nth_element(order.begin() + static_cast<std::ptrdiff_t>(lo),
                     order.begin() + static_cast<std::ptrdiff_t>(mid),
                     order.begin() + static_cast<std::ptrdiff_t>(hi),
                     key_less);
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({order[mid], axis, kNone, kNone});
    const auto left = build(order, lo, mid, depth + 1);
    const auto right = build(order, mid + 1, hi, depth + 1);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
}

void
KdTree::cache_coords() {
    const std::size_t dim = items_.dim();
    node_coords_.resize(nodes_.size() * dim);
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
        const auto v = items_.vector(nodes_[n].slot);
        std::copy(v.begin(), v.end(), node_coords_.begin() + static_cast<std::ptrdiff_t>(n * dim));
    }
}

std::size_t
KdTree::height() const noexcept {
    if (nodes_.empty()) {
        return 0;
    }
    std::size_t best = 0;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0U, 1U}};
    while (!stack.empty()) {
        auto [n, depth] = stack.back();
        stack.pop_back();
        best = std::max(best, depth);
        if (nodes_[n].left != kNone) {
            stack.emplace_back(nodes_[n].left, depth + 1);
        }
        if (nodes_[n].right != kNone) {
            stack.emplace_back(nodes_[n].right, depth + 1);
        }
    }
    return best;
}

namespace {

void
visit(const KdTree::Node* nodes,
      const double* coords,
      const ItemStore& items,
      std::uint32_t n,
      SearchState& s) {
    if (s.max_visits != 0 && s.visits >= s.max_visits) {
        return;
    }
    ++s.visits;
    const auto& node = nodes[n];
    const double* point = coords + static_cast<std::size_t>(n) * s.dim;
    s.top.offer({squared_l2(point, s.query, s.dim), items.info(node.slot).item_id, node.slot});

    const std::uint32_t axis = node.discriminator;
    const double diff = s.query[axis] - point[axis];
    // Left holds coordinates <= the split value, right holds >=.
    const std::uint32_t near = diff < 0.0 ? node.left : node.right;
    const std::uint32_t far = diff < 0.0 ? node.right : node.left;
    if (near != KdTree::kNone) {
        visit(nodes, coords, items, near, s);
    }
    if (far == KdTree::kNone) {
        return;
    }
    const double saved = s.offsets[axis];
    s.offsets[axis] = std::max(saved, std::abs(diff));
    // Each offset bounds its term of squared_l2 from below and the sums are
    // accumulated in the same order, so the comparison is exact in floating
    // point: a subtree is skipped only if none of its items can rank ahead
    // of the current k-th candidate.
    if (!s.top.full() || box_distance(s.offsets) <= s.top.worst().dist2) {
        visit(nodes, coords, items, far, s);
    }
    s.offsets[axis] = saved;
}

}  // namespace

std::vector<detail::Candidate>
KdTree::search_impl(const double* query, std::size_t k) const {
    SearchState state{query, items_.dim(), detail::TopK(k), std::vector<double>(items_.dim(), 0.0), 0,
                      options_.max_visits};
    visit(nodes_.data(), node_coords_.data(), items_, 0, state);
    return std::move(state.top).sorted();
}

}  // namespace proxtrace::ann
