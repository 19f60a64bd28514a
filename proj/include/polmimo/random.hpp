// SPDX-License-Identifier: Apache-2.0
//
// polmimo - dual-polarized Ricean MIMO channel modelling and analysis
// Copyright (C) 2026 The polmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace polmimo
{

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the stream addressed by (seed, i0, i1, ...). Streams for different index
/// tuples are statistically independent, so generation order does not matter.
inline std::uint64_t stream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> indices) noexcept
{
    std::uint64_t s = mix64(seed);
    for (std::uint64_t i : indices)
        s = mix64(s ^ mix64(i + 0x632be59bd9b4e019ULL));
    return s;
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> indices)
{
    return Engine(stream_seed(seed, indices));
}

} // namespace polmimo
