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

#include "polmimo/channel_model.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace polmimo
{

// PMS1 layout, all integers little-endian:
//   "PMS1" | u32 N_RX | u32 N_TX | u32 N_t | u32 N_f | N_TX tag bytes | N_RX tag bytes |
//   N_t * N_f matrices (time-major), each column-major, each entry f64 re then f64 im.
// Tags: 0 = V, 1 = H.

std::vector<std::uint8_t> encode_snapshots(const SnapshotSet &set);

/// Throws FormatError with the failing byte offset.
SnapshotSet decode_snapshots(const std::vector<std::uint8_t> &bytes);

void write_snapshots(const SnapshotSet &set, const std::filesystem::path &path);
SnapshotSet read_snapshots(const std::filesystem::path &path);

/// Writes to a sibling temporary file and renames it over `path`.
/// Throws std::runtime_error when the destination cannot be written.
void write_file_atomic(const std::filesystem::path &path, const std::string &content);

} // namespace polmimo
