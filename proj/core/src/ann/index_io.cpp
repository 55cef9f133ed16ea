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

#include "proxtrace/ann/index_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

#include "proxtrace/ann/brute_force.hpp"
#include "proxtrace/ann/hnsw.hpp"
#include "proxtrace/ann/kd_tree.hpp"
#include "proxtrace/error.hpp"

static_assert(std::endian::native == std::endian::little, "index files are written in host byte order");

namespace proxtrace::ann {

namespace {

constexpr std::string_view kMagic = "PXTINDEX";
constexpr std::size_t kMaxDim = 4096;
constexpr std::size_t kItemBytes = 8 + 8 + 4;

std::uint64_t
fnv1a(std::span<const std::uint8_t> bytes) noexcept {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (std::uint8_t b : bytes) {
        hash ^= b;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

class Writer {
 public:
    template <typename T>
    void
    put(T value) {
        const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
        bytes_.insert(bytes_.end(), p, p + sizeof(T));
    }

    void
    put_bytes(std::string_view s) {
        bytes_.insert(bytes_.end(), s.begin(), s.end());
    }

    std::vector<std::uint8_t>
    finish() && {
        put(fnv1a(bytes_));
        return std::move(bytes_);
    }

 private:
    std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {
    }

    template <typename T>
    T
    get() {
        need(sizeof(T));
        T value;
        std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }

    std::string
    get_string(std::size_t n) {
        need(n);
        std::string out(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return out;
    }

    std::size_t
    remaining() const noexcept {
        return bytes_.size() - pos_;
    }

 private:
    void
    need(std::size_t n) const {
        if (n > remaining()) {
            throw Error(ErrorKind::format, "index file truncated");
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

class IndexSerializer {
 public:
    static void
    write_items(Writer& w, const ItemStore& items) {
        for (const auto& info : items.infos()) {
            w.put<std::int64_t>(info.item_id);
            w.put<std::int64_t>(info.user_id);
            w.put<std::uint32_t>(info.timestep);
        }
        for (double c : items.data()) {
            if (items.representation() == Representation::raw) {
                w.put<double>(c);
            } else {
                w.put<std::uint32_t>(static_cast<std::uint32_t>(c));
            }
        }
    }

    static ItemStore
    read_items(Reader& r, Representation representation, std::size_t dim, std::size_t count) {
        const std::size_t component = representation == Representation::raw ? 8 : 4;
        if (count > r.remaining() / (kItemBytes + dim * component)) {
            throw Error(ErrorKind::format, "index file item count exceeds its size");
        }
        std::vector<ItemInfo> infos(count);
        for (auto& info : infos) {
            info.item_id = r.get<std::int64_t>();
            info.user_id = r.get<std::int64_t>();
            info.timestep = r.get<std::uint32_t>();
        }
        ItemStore items(representation, dim);
        items.reserve(count);
        std::vector<double> vec(dim);
        for (std::size_t i = 0; i < count; ++i) {
            for (auto& c : vec) {
                c = representation == Representation::raw ? r.get<double>()
                                                          : static_cast<double>(r.get<std::uint32_t>());
            }
            try {
                items.add(infos[i], vec);
            } catch (const Error& e) {
                throw Error(ErrorKind::format, std::string("index file item rejected: ") + e.what());
            }
        }
        return items;
    }

    static void
    write_payload(Writer& w, const KdTree& tree) {
        w.put<std::uint64_t>(tree.options_.max_visits);
        w.put<std::uint64_t>(tree.nodes_.size());
        for (const auto& n : tree.nodes_) {
            w.put<std::uint32_t>(n.slot);
            w.put<std::uint32_t>(n.discriminator);
            w.put<std::uint32_t>(n.left);
            w.put<std::uint32_t>(n.right);
        }
    }

    static std::unique_ptr<NeighborIndex>
    read_kd(Reader& r, ItemStore items) {
        KdOptions options;
        options.max_visits = r.get<std::uint64_t>();
        const auto count = r.get<std::uint64_t>();
        const std::size_t n = items.size();
        if (count != n || n == 0) {
            throw Error(ErrorKind::format, "kd payload node count does not match item count");
        }
        std::vector<KdTree::Node> nodes(n);
        std::vector<char> slot_seen(n, 0);
        std::vector<char> has_parent(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& node = nodes[i];
            node.slot = r.get<std::uint32_t>();
            node.discriminator = r.get<std::uint32_t>();
            node.left = r.get<std::uint32_t>();
            node.right = r.get<std::uint32_t>();
            if (node.slot >= n || slot_seen[node.slot] || node.discriminator >= items.dim()) {
                throw Error(ErrorKind::format, "kd payload has an invalid node");
            }
            slot_seen[node.slot] = 1;
            for (std::uint32_t child : {node.left, node.right}) {
                if (child == KdTree::kNone) {
                    continue;
                }
                // Preorder layout: children follow their parent.
                if (child <= i || child >= n || has_parent[child]) {
                    throw Error(ErrorKind::format, "kd payload is not a tree");
                }
                has_parent[child] = 1;
            }
        }
        items.check_unique_ids();
        return std::unique_ptr<NeighborIndex>(new KdTree(std::move(items), options, std::move(nodes)));
    }

    static void
    write_payload(Writer& w, const HnswIndex& g) {
        w.put<std::uint64_t>(g.params_.max_neighbors);
        w.put<std::uint64_t>(g.params_.ef_construction);
        w.put<std::uint64_t>(g.params_.ef_search);
        w.put<double>(g.params_.level_mult);
        w.put<std::uint64_t>(g.params_.seed);
        const auto state = g.rng_.serialize_state();
        w.put<std::uint32_t>(static_cast<std::uint32_t>(state.size()));
        w.put_bytes(state);
        w.put<std::int32_t>(g.max_level_);
        w.put<std::uint32_t>(g.entry_);
        for (std::uint32_t slot = 0; slot < g.levels_.size(); ++slot) {
            w.put<std::int32_t>(g.levels_[slot]);
            for (int layer = 0; layer <= g.levels_[slot]; ++layer) {
                const auto adj = g.neighbors(slot, layer);
                w.put<std::uint32_t>(static_cast<std::uint32_t>(adj.size()));
                for (std::uint32_t s : adj) {
                    w.put<std::uint32_t>(s);
                }
            }
        }
    }

    static std::unique_ptr<NeighborIndex>
    read_hnsw(Reader& r, ItemStore items) {
        HnswParams params;
        params.max_neighbors = r.get<std::uint64_t>();
        params.ef_construction = r.get<std::uint64_t>();
        params.ef_search = r.get<std::uint64_t>();
        params.level_mult = r.get<double>();
        params.seed = r.get<std::uint64_t>();
        if (params.max_neighbors > 1u << 16) {
            throw Error(ErrorKind::format, "hnsw payload has an implausible degree");
        }
        try {
            params.validate();
        } catch (const Error& e) {
            throw Error(ErrorKind::format, std::string("hnsw payload parameters: ") + e.what());
        }
        const auto state_len = r.get<std::uint32_t>();
        const auto state = r.get_string(state_len);

        auto g = std::make_unique<HnswIndex>(items.representation(), items.dim(), params);
        g->rng_.restore_state(state);
        g->max_level_ = r.get<std::int32_t>();
        g->entry_ = r.get<std::uint32_t>();
        const std::size_t n = items.size();
        if (n == 0 ? (g->entry_ != HnswIndex::kNone || g->max_level_ != -1)
                   : (g->entry_ >= n || g->max_level_ < 0 || g->max_level_ > 64)) {
            throw Error(ErrorKind::format, "hnsw payload has an invalid entry point");
        }
        g->levels_.resize(n);
        g->links0_.assign(n * (1 + g->degree_cap(0)), 0U);
        g->upper_links_.resize(n);
        for (std::uint32_t slot = 0; slot < n; ++slot) {
            const int level = r.get<std::int32_t>();
            if (level < 0 || level > g->max_level_) {
                throw Error(ErrorKind::format, "hnsw payload has an invalid node level");
            }
            g->levels_[slot] = level;
            g->upper_links_[slot].assign(static_cast<std::size_t>(level) * (1 + params.max_neighbors), 0U);
            for (int layer = 0; layer <= level; ++layer) {
                const auto count = r.get<std::uint32_t>();
                if (count > g->degree_cap(layer)) {
                    throw Error(ErrorKind::format, "hnsw payload exceeds the degree cap");
                }
                std::uint32_t* block = g->link_block(slot, layer);
                block[0] = count;
                for (std::uint32_t i = 0; i < count; ++i) {
                    const auto s = r.get<std::uint32_t>();
                    if (s >= n) {
                        throw Error(ErrorKind::format, "hnsw payload links to a missing node");
                    }
                    block[1 + i] = s;
                }
            }
        }
        for (std::uint32_t slot = 0; slot < n; ++slot) {
            for (int layer = 1; layer <= g->levels_[slot]; ++layer) {
                for (std::uint32_t s : g->neighbors(slot, layer)) {
                    if (g->levels_[s] < layer) {
                        throw Error(ErrorKind::format, "hnsw payload links above a node's level");
                    }
                }
            }
        }
        if (n > 0 && g->levels_[g->entry_] != g->max_level_) {
            throw Error(ErrorKind::format, "hnsw entry point is not on the top layer");
        }
        for (const auto& info : items.infos()) {
            if (!g->ids_.insert(info.item_id).second) {
                throw Error(ErrorKind::format, "hnsw payload has duplicate item ids");
            }
        }
        g->items_ = std::move(items);
        return g;
    }

    static std::vector<std::uint8_t>
    serialize(const NeighborIndex& index) {
        Writer w;
        w.put_bytes(kMagic);
        w.put<std::uint32_t>(kIndexFormatVersion);
        w.put<std::uint8_t>(static_cast<std::uint8_t>(index.backend()));
        w.put<std::uint8_t>(static_cast<std::uint8_t>(index.representation()));
        w.put<std::uint16_t>(0);
        w.put<std::uint32_t>(static_cast<std::uint32_t>(index.dim()));
        w.put<std::uint64_t>(index.size());
        write_items(w, index.items());
        switch (index.backend()) {
            case Backend::brute:
                break;
            case Backend::kd:
                write_payload(w, static_cast<const KdTree&>(index));
                break;
            case Backend::hnsw:
                write_payload(w, static_cast<const HnswIndex&>(index));
                break;
        }
        return std::move(w).finish();
    }

    static std::unique_ptr<NeighborIndex>
    deserialize(std::span<const std::uint8_t> bytes) {
        if (bytes.size() < kMagic.size() + 8 ||
            std::string_view(reinterpret_cast<const char*>(bytes.data()), kMagic.size()) != kMagic) {
            throw Error(ErrorKind::format, "not an index file (bad magic)");
        }
        std::uint32_t version = 0;
        std::memcpy(&version, bytes.data() + kMagic.size(), sizeof(version));
        if (version != kIndexFormatVersion) {
            throw Error(ErrorKind::version, "unsupported index format version " + std::to_string(version));
        }
        const auto body = bytes.first(bytes.size() - 8);
        std::uint64_t stored = 0;
        std::memcpy(&stored, bytes.data() + body.size(), sizeof(stored));
        if (stored != fnv1a(body)) {
            throw Error(ErrorKind::format, "index file checksum mismatch");
        }

        Reader r(body);
        r.get_string(kMagic.size());
        r.get<std::uint32_t>();
        const auto backend_tag = r.get<std::uint8_t>();
        const auto repr_tag = r.get<std::uint8_t>();
        r.get<std::uint16_t>();
        const auto dim = r.get<std::uint32_t>();
        const auto count = r.get<std::uint64_t>();
        if (backend_tag > 2 || repr_tag > 1) {
            throw Error(ErrorKind::format, "index file has an unknown backend or representation tag");
        }
        if (dim == 0 || dim > kMaxDim) {
            throw Error(ErrorKind::format, "index file has an implausible dimension");
        }
        auto items = read_items(r, static_cast<Representation>(repr_tag), dim, count);
        std::unique_ptr<NeighborIndex> index;
        switch (static_cast<Backend>(backend_tag)) {
            case Backend::brute:
                try {
                    index = std::make_unique<BruteForceIndex>(std::move(items));
                } catch (const Error& e) {
                    throw Error(ErrorKind::format, std::string("index file items: ") + e.what());
                }
                break;
            case Backend::kd:
                index = read_kd(r, std::move(items));
                break;
            case Backend::hnsw:
                index = read_hnsw(r, std::move(items));
                break;
        }
        if (r.remaining() != 0) {
            throw Error(ErrorKind::format, "index file has trailing bytes");
        }
        return index;
    }
};

std::vector<std::uint8_t>
serialize_index(const NeighborIndex& index) {
    return IndexSerializer::serialize(index);
}

std::unique_ptr<NeighborIndex>
deserialize_index(std::span<const std::uint8_t> bytes) {
    return IndexSerializer::deserialize(bytes);
}

void
save_index(const NeighborIndex& index, const std::filesystem::path& path) {
    const auto bytes = serialize_index(index);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(ErrorKind::io, "write failed: " + path.string());
    }
}

std::unique_ptr<NeighborIndex>
load_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::io, "cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw Error(ErrorKind::io, "read failed: " + path.string());
    }
    return deserialize_index(bytes);
}

}  // namespace proxtrace::ann
