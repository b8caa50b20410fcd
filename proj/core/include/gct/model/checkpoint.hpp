// Copyright 2026 The gctransfer Authors
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

#include <cstdint>
#include <filesystem>
#include <stdexcept>

#include "gct/model/params.hpp"

namespace gct::model {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout, little-endian throughout:
///   "GCTF" | u32 version | config record | u32 tensor count |
///   per tensor: u32 rank, u32 extents[rank], f32 values[...]
/// The config record is: u32 architecture, u32 attention flag,
/// f64 desk scale, u32 num_decoders, u32 n + u32[n] encoder channels,
/// u32 n + u32[n] decoder channels.
///
/// A text manifest (`<path>.manifest`) lists name, shape and CRC-32 of each
/// tensor's bytes.
void save_checkpoint(const ModelParams<float>& params, const std::filesystem::path& path);
ModelParams<float> load_checkpoint(const std::filesystem::path& path);

std::filesystem::path manifest_path(const std::filesystem::path& checkpoint);

}  // namespace gct::model
