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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace proxtrace::ann::detail {

/// Ranking key used by every backend: squared distance, then item_id.
struct Candidate {
    double dist2;
    std::int64_t item_id;
    std::uint32_t slot;
};

inline bool
closer(const Candidate& a, const Candidate& b) noexcept {
    return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.item_id < b.item_id);
}

struct Closer {
    bool
    operator()(const Candidate& a, const Candidate& b) const noexcept {
        return closer(a, b);
    }
};

struct Farther {
    bool
    operator()(const Candidate& a, const Candidate& b) const noexcept {
        return closer(b, a);
    }
};

/// Keeps the k closest candidates seen so far (max-heap on the ranking key).
class TopK {
 public:
    explicit TopK(std::size_t k) : k_(k) {
        heap_.reserve(k + 1);
    }

    bool
    full() const noexcept {
        return heap_.size() >= k_;
    }

    const Candidate&
    worst() const noexcept {
        return heap_.front();
    }

    void
    offer(const Candidate& c) {
        if (heap_.size() < k_) {
            heap_.push_back(c);
            std::push_heap(heap_.begin(), heap_.end(), Closer{});
        } else if (closer(c, heap_.front())) {
            std::pop_heap(heap_.begin(), heap_.end(), Closer{});
            heap_.back() = c;
            std::push_heap(heap_.begin(), heap_.end(), Closer{});
        }
    }

    std::vector<Candidate>
    sorted() && {
        std::sort_heap(heap_.begin(), heap_.end(), Closer{});
        return std::move(heap_);
    }

 private:
    std::size_t k_;
    std::vector<Candidate> heap_;
};

}  // namespace proxtrace::ann::detail
