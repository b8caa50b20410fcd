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

#include <filesystem>

#include "gct/mesh/mesh.hpp"

namespace gct::mesh {

/// Reads the v/f subset of Wavefront OBJ. Face entries may carry /vt/vn
/// suffixes, which are dropped; polygons are fan-triangulated.
Mesh load_obj(const std::filesystem::path& path);

/// Writes coordinates with 17 significant digits so load_obj reproduces them exactly.
void save_obj(const Mesh& mesh, const std::filesystem::path& path);

}  // namespace gct::mesh
