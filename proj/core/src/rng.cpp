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

#include "proxtrace/rng.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "proxtrace/error.hpp"

namespace proxtrace {

std::uint64_t
Rng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
    if (hi < lo) {
        throw Error(ErrorKind::invalid_argument, "uniform_int: empty range");
    }
    const std::uint64_t span = hi - lo;
    if (span == std::numeric_limits<std::uint64_t>::max()) {
        return engine_();
    }
    const std::uint64_t range = span + 1;
    // Reject the top partial bucket so every residue is equally likely.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t draw = engine_();
    while (draw >= limit) {
        draw = engine_();
    }
    return lo + draw % range;
}

double
Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = uniform(-1.0, 1.0);
        v = uniform(-1.0, 1.0);
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

std::string
Rng::serialize_state() const {
    std::ostringstream out;
    out << engine_;
    // Hex float keeps the cached variate bit-exact.
    if (has_spare_) {
        out << " spare " << std::hexfloat << spare_;
    }
    return out.str();
}

void
Rng::restore_state(const std::string& state) {
    std::istringstream in(state);
    in >> engine_;
    if (!in) {
        throw Error(ErrorKind::format, "unreadable generator state");
    }
    has_spare_ = false;
    std::string tag;
    if (in >> tag) {
        std::string value;
        if (tag != "spare" || !(in >> value)) {
            throw Error(ErrorKind::format, "unreadable generator state");
        }
        spare_ = std::strtod(value.c_str(), nullptr);
        has_spare_ = true;
    }
}

}  // namespace proxtrace
