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

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "proxtrace/geometry.hpp"
#include "proxtrace/rng.hpp"

namespace proxtrace {

using UserId = std::int64_t;

/// One user's samples, ordered by time.
struct TrajectoryRecord {
    UserId user_id = 0;
    std::vector<SpaceTimePoint> points;

    bool
    operator==(const TrajectoryRecord&) const = default;
};

/// Who came within the contact radius of whom. Contacts added through
/// add_contact() are always symmetric and never reflexive; loaders may
/// install arbitrary sets, which is_symmetric()/is_irreflexive() can audit.
class ContactGroundTruth {
 public:
    /// Throws Error(invalid_argument) when a == b.
    void
    add_contact(UserId a, UserId b);

    void
    set_contacts(UserId user, std::set<UserId> contacts);

    /// Empty set for users without contacts.
    const std::set<UserId>&
    contacts_of(UserId user) const;

    const std::map<UserId, std::set<UserId>>&
    entries() const noexcept {
        return contacts_;
    }

    bool
    empty() const noexcept {
        return contacts_.empty();
    }

    bool
    is_symmetric() const;

    bool
    is_irreflexive() const;

    bool
    operator==(const ContactGroundTruth&) const = default;

 private:
    std::map<UserId, std::set<UserId>> contacts_;
};

struct Dataset {
    /// "walks", "checkins" or whatever a loaded file declares.
    std::string kind = "walks";
    /// Users with ids in [0, population) are the real population and may be
    /// chosen as infected queries; other ids are synthetic (ghost) users.
    /// Zero means every user is real.
    std::size_t population = 0;
    /// Sorted by ascending user_id.
    std::vector<TrajectoryRecord> records;
    ContactGroundTruth truth;
    /// Set by loaders when no ground-truth file was found.
    bool truth_missing = false;

    std::size_t
    instance_count() const noexcept;

    bool
    is_real_user(UserId user) const noexcept {
        return population == 0 || (user >= 0 && static_cast<std::size_t>(user) < population);
    }

    std::vector<SpaceTimePoint>
    all_points() const;

    bool
    operator==(const Dataset&) const = default;
};

enum class Boundary {
    clamp,
    reflect,
};

struct WalkConfig {
    std::size_t n_agents = 10000;
    /// Edge of the spatial cube [0, box_edge]^3.
    double box_edge = 100.0;
    std::uint32_t tau_min = 100;
    std::uint32_t tau_max = 200;
    /// Spatial radius defining a contact at a shared timestep.
    double contact_epsilon = 1.0;
    std::uint64_t seed = 7;
    Boundary boundary = Boundary::clamp;
    /// Multiplier applied to the integer step index to form the time axis.
    double time_scale = 1.0;

    void
    validate() const;
};

/// One random-walk increment per spatial axis, uniform in [-1, 1).
inline double
walk_increment(Rng& rng) {
    return rng.uniform(-1.0, 1.0);
}

/// Random-walk trajectories plus the contact ground truth.
///
/// Agent i starts uniformly in the cube, walks tau_i ~ U{tau_min..tau_max}
/// steps (tau_i + 1 samples, t = 0..tau_i) and every pair of agents whose
/// spatial L2 distance is within contact_epsilon at the same step becomes a
/// mutual contact. Draw order is fixed (agent by agent: start, tau, steps),
/// so one seed always yields the same dataset.
Dataset
generate_walks(const WalkConfig& cfg);

struct GhostConfig {
    std::size_t n_real_users = 10000;
    /// Ghosts placed inside the inner ball; these are the retrieval targets.
    std::size_t inner_count = 30;
    /// Ghosts placed in the annulus between the two radii (distractors).
    std::size_t outer_count = 60;
    double inner_radius = 1.0;
    double outer_radius = 2.0;
    /// Edge of the spatial cube real check-ins are drawn from.
    double extent = 100.0;
    /// Number of distinct check-in times, spaced 2 * outer_radius apart.
    /// Zero gives every real user its own time.
    std::size_t time_slots = 0;
    std::uint64_t seed = 11;

    void
    validate() const;
};

/// One check-in per real user with ghost users around it.
///
/// Real users get ids 0..n-1; ghost j of real user u gets id
/// n + u * (inner + outer) + j, inner ghosts first. Real check-ins are
/// rejection-sampled so that any two lie more than 2 * outer_radius apart in
/// space-time; giving up after 10 * n draws throws Error(over_dense).
Dataset
generate_checkins(const GhostConfig& cfg);

struct DatasetSummary {
    /// Every record, ghosts included.
    std::size_t n_users = 0;
    /// Users eligible as infected queries.
    std::size_t n_real_users = 0;
    std::size_t n_instances = 0;
    /// Steps per user (samples - 1).
    std::size_t min_steps = 0;
    std::size_t max_steps = 0;
    std::array<double, kSpaceTimeDim> lower{};
    std::array<double, kSpaceTimeDim> upper{};
    /// Unit cells of the planar x/y grid covering the data.
    std::size_t grid_cells = 0;
    double rho_users = 0.0;
    double rho_instances = 0.0;

    bool
    operator==(const DatasetSummary&) const = default;
};

DatasetSummary
summarize(const Dataset& dataset);

/// Versioned key=value block.
void
write_summary(std::ostream& out, const DatasetSummary& summary);

}  // namespace proxtrace
