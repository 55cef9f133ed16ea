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

#include "proxtrace/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <unordered_map>

#include "proxtrace/detail/text.hpp"
#include "proxtrace/error.hpp"

namespace proxtrace {

void
ContactGroundTruth::add_contact(UserId a, UserId b) {
    if (a == b) {
        throw Error(ErrorKind::invalid_argument, "a user cannot be its own contact");
    }
    contacts_[a].insert(b);
    contacts_[b].insert(a);
}

void
ContactGroundTruth::set_contacts(UserId user, std::set<UserId> contacts) {
    if (contacts.empty()) {
        contacts_.erase(user);
    } else {
        contacts_[user] = std::move(contacts);
    }
}

const std::set<UserId>&
ContactGroundTruth::contacts_of(UserId user) const {
    static const std::set<UserId> kNoContacts;
    const auto it = contacts_.find(user);
    return it == contacts_.end() ? kNoContacts : it->second;
}

bool
ContactGroundTruth::is_symmetric() const {
    for (const auto& [user, contacts] : contacts_) {
        for (UserId other : contacts) {
            if (!contacts_of(other).contains(user)) {
                return false;
            }
        }
    }
    return true;
}

bool
ContactGroundTruth::is_irreflexive() const {
    return std::none_of(
        contacts_.begin(), contacts_.end(), [](const auto& entry) { return entry.second.contains(entry.first); });
}

std::size_t
Dataset::instance_count() const noexcept {
    std::size_t n = 0;
    for (const auto& r : records) {
        n += r.points.size();
    }
    return n;
}

std::vector<SpaceTimePoint>
Dataset::all_points() const {
    std::vector<SpaceTimePoint> out;
    out.reserve(instance_count());
    for (const auto& r : records) {
        out.insert(out.end(), r.points.begin(), r.points.end());
    }
    return out;
}

void
WalkConfig::validate() const {
    if (n_agents < 1) {
        throw Error(ErrorKind::invalid_argument, "walks need at least one agent");
    }
    if (!std::isfinite(box_edge) || box_edge <= 0.0) {
        throw Error(ErrorKind::invalid_argument, "box edge must be positive");
    }
    if (tau_min < 1 || tau_min > tau_max) {
        throw Error(ErrorKind::invalid_argument, "need 1 <= tau_min <= tau_max");
    }
    if (!std::isfinite(contact_epsilon) || contact_epsilon <= 0.0 || contact_epsilon >= box_edge) {
        throw Error(ErrorKind::invalid_argument, "contact epsilon must lie in (0, box_edge)");
    }
    if (!std::isfinite(time_scale) || time_scale <= 0.0) {
        throw Error(ErrorKind::invalid_argument, "time scale must be positive");
    }
}

namespace {

double
step_within(double x, double increment, double edge, Boundary boundary) {
    double next = x + increment;
    if (boundary == Boundary::reflect) {
        if (next < 0.0) {
            next = -next;
        } else if (next > edge) {
            next = 2.0 * edge - next;
        }
    }
    return std::clamp(next, 0.0, edge);
}

/// Packs integer cell coordinates into one sortable key.
class CellKey {
 public:
    CellKey(double cell_size, double extent)
        : inv_(1.0 / cell_size), span_(static_cast<std::int64_t>(std::floor(extent / cell_size)) + 3) {
    }

    std::int64_t
    axis(double v) const noexcept {
        return static_cast<std::int64_t>(std::floor(v * inv_)) + 1;
    }

    std::int64_t
    key(std::int64_t cx, std::int64_t cy, std::int64_t cz) const noexcept {
        return (cx * span_ + cy) * span_ + cz;
    }

 private:
    double inv_;
    std::int64_t span_;
};

void
detect_contacts(const std::vector<TrajectoryRecord>& records, const WalkConfig& cfg, ContactGroundTruth& truth) {
    std::size_t horizon = 0;
    for (const auto& r : records) {
        horizon = std::max(horizon, r.points.size());
    }
    const CellKey cells(cfg.contact_epsilon, cfg.box_edge);
    std::vector<std::pair<std::int64_t, std::uint32_t>> occupied;
    occupied.reserve(records.size());
    for (std::size_t t = 0; t < horizon; ++t) {
        occupied.clear();
        for (std::uint32_t a = 0; a < records.size(); ++a) {
            if (t < records[a].points.size()) {
                const auto& p = records[a].points[t];
                occupied.emplace_back(cells.key(cells.axis(p.x()), cells.axis(p.y()), cells.axis(p.z())), a);
            }
        }
        std::sort(occupied.begin(), occupied.end());
        for (const auto& [own_key, a] : occupied) {
            const auto& pa = records[a].points[t];
            const auto cx = cells.axis(pa.x());
            const auto cy = cells.axis(pa.y());
            const auto cz = cells.axis(pa.z());
            for (std::int64_t dx = -1; dx <= 1; ++dx) {
                for (std::int64_t dy = -1; dy <= 1; ++dy) {
                    for (std::int64_t dz = -1; dz <= 1; ++dz) {
                        const auto key = cells.key(cx + dx, cy + dy, cz + dz);
                        auto it = std::lower_bound(occupied.begin(), occupied.end(), std::make_pair(key, a + 1));
                        for (; it != occupied.end() && it->first == key; ++it) {
                            const auto& pb = records[it->second].points[t];
                            const double ex = pa.x() - pb.x();
                            const double ey = pa.y() - pb.y();
                            const double ez = pa.z() - pb.z();
                            if (std::sqrt(ex * ex + ey * ey + ez * ez) <= cfg.contact_epsilon) {
                                truth.add_contact(records[a].user_id, records[it->second].user_id);
                            }
                        }
                    }
                }
            }
        }
    }
}

}  // namespace

Dataset
generate_walks(const WalkConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    Dataset ds;
    ds.kind = "walks";
    ds.population = cfg.n_agents;
    ds.records.resize(cfg.n_agents);
    for (std::size_t i = 0; i < cfg.n_agents; ++i) {
        auto& rec = ds.records[i];
        rec.user_id = static_cast<UserId>(i);
        double x = rng.uniform(0.0, cfg.box_edge);
        double y = rng.uniform(0.0, cfg.box_edge);
        double z = rng.uniform(0.0, cfg.box_edge);
        const auto tau = static_cast<std::size_t>(rng.uniform_int(cfg.tau_min, cfg.tau_max));
        rec.points.reserve(tau + 1);
        rec.points.push_back(SpaceTimePoint::scaled(x, y, z, 0.0, cfg.time_scale));
        for (std::size_t t = 1; t <= tau; ++t) {
            x = step_within(x, walk_increment(rng), cfg.box_edge, cfg.boundary);
            y = step_within(y, walk_increment(rng), cfg.box_edge, cfg.boundary);
            z = step_within(z, walk_increment(rng), cfg.box_edge, cfg.boundary);
            rec.points.push_back(SpaceTimePoint::scaled(x, y, z, static_cast<double>(t), cfg.time_scale));
        }
    }
    detect_contacts(ds.records, cfg, ds.truth);
    return ds;
}

void
GhostConfig::validate() const {
    if (n_real_users < 1) {
        throw Error(ErrorKind::invalid_argument, "check-ins need at least one real user");
    }
    if (inner_count < 1 || outer_count < 1) {
        throw Error(ErrorKind::invalid_argument, "ghost counts must be positive");
    }
    if (!std::isfinite(inner_radius) || !std::isfinite(outer_radius) || inner_radius <= 0.0 ||
        inner_radius >= outer_radius) {
        throw Error(ErrorKind::invalid_argument, "need 0 < inner_radius < outer_radius");
    }
    if (!std::isfinite(extent) || extent <= 0.0) {
        throw Error(ErrorKind::invalid_argument, "check-in extent must be positive");
    }
}

namespace {

using Vec4 = std::array<double, kSpaceTimeDim>;

double
norm(const Vec4& v) {
    return std::sqrt(squared_l2(v.data(), Vec4{}.data(), v.size()));
}

/// Uniform offset with lo < |v| <= hi (lo = 0 includes the centre),
/// by rejection from the bounding cube.
Vec4
sample_shell(Rng& rng, double lo, double hi) {
    while (true) {
        Vec4 v;
        for (auto& c : v) {
            c = rng.uniform(-hi, hi);
        }
        const double r = norm(v);
        if (r <= hi && (lo == 0.0 ? true : r > lo)) {
            return v;
        }
    }
}

}  // namespace

Dataset
generate_checkins(const GhostConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const std::size_t n = cfg.n_real_users;
    const double separation = 2.0 * cfg.outer_radius;
    const std::size_t slots = cfg.time_slots == 0 ? n : cfg.time_slots;

    std::vector<std::size_t> slot_of(n);
    for (std::size_t u = 0; u < n; ++u) {
        slot_of[u] = u % slots;
    }
    rng.shuffle(std::span<std::size_t>(slot_of));

    // Uniform 4-d hash grid with cell edge equal to the separation radius.
    const auto cell_of = [&](double v) { return static_cast<std::int64_t>(std::floor(v / separation)); };
    const auto pack = [](std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
        std::uint64_t h = 1469598103934665603ULL;
        for (std::int64_t v : {a, b, c, d}) {
            h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ULL;
        }
        return h;
    };
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
    std::vector<Vec4> real(n);
    std::size_t attempts = 0;
    const std::size_t budget = 10 * n;
    for (std::size_t u = 0; u < n; ++u) {
        while (true) {
            if (++attempts > budget) {
                throw Error(ErrorKind::over_dense,
                            "could not place " + std::to_string(n) + " separated check-ins in " +
                                std::to_string(budget) + " draws; enlarge extent or time_slots");
            }
            Vec4 p{rng.uniform(0.0, cfg.extent), rng.uniform(0.0, cfg.extent), rng.uniform(0.0, cfg.extent),
                   static_cast<double>(slot_of[u]) * separation};
            const std::int64_t c[4] = {cell_of(p[0]), cell_of(p[1]), cell_of(p[2]), cell_of(p[3])};
            bool clear = true;
            for (int d0 = -1; d0 <= 1 && clear; ++d0) {
                for (int d1 = -1; d1 <= 1 && clear; ++d1) {
                    for (int d2 = -1; d2 <= 1 && clear; ++d2) {
                        for (int d3 = -1; d3 <= 1 && clear; ++d3) {
                            const auto it = grid.find(pack(c[0] + d0, c[1] + d1, c[2] + d2, c[3] + d3));
                            if (it == grid.end()) {
                                continue;
                            }
                            for (std::size_t other : it->second) {
                                if (std::sqrt(squared_l2(p.data(), real[other].data(), p.size())) <= separation) {
                                    clear = false;
                                    break;
                                }
                            }
                        }
                    }
                }
            }
            if (clear) {
                real[u] = p;
                grid[pack(c[0], c[1], c[2], c[3])].push_back(u);
                break;
            }
        }
    }

    Dataset ds;
    ds.kind = "checkins";
    ds.population = n;
    const std::size_t per_user = cfg.inner_count + cfg.outer_count;
    ds.records.reserve(n * (1 + per_user));
    for (std::size_t u = 0; u < n; ++u) {
        ds.records.push_back({static_cast<UserId>(u), {SpaceTimePoint(real[u][0], real[u][1], real[u][2], real[u][3])}});
    }
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t j = 0; j < per_user; ++j) {
            const bool inner = j < cfg.inner_count;
            const Vec4 offset = inner ? sample_shell(rng, 0.0, cfg.inner_radius)
                                      : sample_shell(rng, cfg.inner_radius, cfg.outer_radius);
            const auto ghost = static_cast<UserId>(n + u * per_user + j);
            ds.records.push_back({ghost,
                                  {SpaceTimePoint(real[u][0] + offset[0],
                                                  real[u][1] + offset[1],
                                                  real[u][2] + offset[2],
                                                  real[u][3] + offset[3])}});
            if (inner) {
                ds.truth.add_contact(static_cast<UserId>(u), ghost);
            }
        }
    }
    return ds;
}

DatasetSummary
summarize(const Dataset& dataset) {
    DatasetSummary s;
    s.n_users = dataset.records.size();
    for (const auto& r : dataset.records) {
        s.n_real_users += dataset.is_real_user(r.user_id);
    }
    s.min_steps = std::numeric_limits<std::size_t>::max();
    s.lower.fill(std::numeric_limits<double>::infinity());
    s.upper.fill(-std::numeric_limits<double>::infinity());
    for (const auto& r : dataset.records) {
        s.n_instances += r.points.size();
        const std::size_t steps = r.points.empty() ? 0 : r.points.size() - 1;
        s.min_steps = std::min(s.min_steps, steps);
        s.max_steps = std::max(s.max_steps, steps);
        for (const auto& p : r.points) {
            for (std::size_t a = 0; a < kSpaceTimeDim; ++a) {
                s.lower[a] = std::min(s.lower[a], p[a]);
                s.upper[a] = std::max(s.upper[a], p[a]);
            }
        }
    }
    if (s.n_instances == 0) {
        s.min_steps = 0;
        s.lower.fill(0.0);
        s.upper.fill(0.0);
    }
    const auto cells_along = [&](std::size_t axis) {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(s.upper[axis] - s.lower[axis])));
    };
    s.grid_cells = cells_along(0) * cells_along(1);
    s.rho_users = static_cast<double>(s.n_users) / static_cast<double>(s.grid_cells);
    s.rho_instances = static_cast<double>(s.n_instances) / static_cast<double>(s.grid_cells);
    return s;
}

void
write_summary(std::ostream& out, const DatasetSummary& s) {
    out << "# proxtrace-summary v1\n";
    out << "n_users=" << s.n_users << '\n';
    out << "n_real_users=" << s.n_real_users << '\n';
    out << "n_instances=" << s.n_instances << '\n';
    out << "step_range=" << s.min_steps << '-' << s.max_steps << '\n';
    static constexpr const char* kAxes[] = {"x", "y", "z", "t"};
    for (std::size_t a = 0; a < kSpaceTimeDim; ++a) {
        out << "extent_" << kAxes[a] << '=' << detail::format_double(s.lower[a]) << ','
            << detail::format_double(s.upper[a]) << '\n';
    }
    out << "grid_cells_xy=" << s.grid_cells << '\n';
    out << "rho_users_per_cell=" << detail::format_double(s.rho_users) << '\n';
    out << "rho_instances_per_cell=" << detail::format_double(s.rho_instances) << '\n';
}

}  // namespace proxtrace
