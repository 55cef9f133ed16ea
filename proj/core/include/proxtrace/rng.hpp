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
#include <random>
#include <span>
#include <string>

namespace proxtrace {

/// Seedable generator used for every random draw in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard <random> distributions are not (libstdc++ and libc++
/// disagree), so the conversions to uniform reals, bounded integers and
/// normals are defined here. Datasets and graphs built from the same seed are
/// therefore byte-identical across platforms.
class Rng {
 public:
    static constexpr std::string_view kAlgorithm = "mt19937_64";

    explicit Rng(std::uint64_t seed) : engine_(seed) {
    }

    std::uint64_t
    next() {
        return engine_();
    }

    /// Uniform in [0, 1) with 53 random bits.
    double
    uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double
    uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Uniform integer in the closed range [lo, hi], unbiased.
    std::uint64_t
    uniform_int(std::uint64_t lo, std::uint64_t hi);

    /// Standard normal variate (Marsaglia polar method).
    double
    normal();

    /// Fisher-Yates shuffle driven by uniform_int.
    template <typename T>
    void
    shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            auto j = static_cast<std::size_t>(uniform_int(0, i - 1));
            std::swap(values[i - 1], values[j]);
        }
    }

    std::string
    serialize_state() const;

    void
    restore_state(const std::string& state);

 private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace proxtrace
