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
#include <string>
#include <vector>

#include "gct/mesh/mesh.hpp"

namespace gct::mesh {

/// Identity donor, pose donor and the expected transfer result. All three
/// share one face list.
struct PosePair {
  Mesh identity;
  Mesh pose;
  Mesh ground_truth;
};

struct PairPaths {
  std::filesystem::path identity;
  std::filesystem::path pose;
  std::filesystem::path ground_truth;
  friend bool operator==(const PairPaths&, const PairPaths&) = default;
};

/// One pair per line: three whitespace-separated OBJ paths. Relative paths
/// resolve against the manifest's directory. Blank lines and '#' comments
/// are skipped.
std::vector<PairPaths> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::vector<PairPaths>& pairs, const std::filesystem::path& path);

/// Throws MeshError if the three meshes do not share topology or have fewer
/// than four vertices.
void check_pair(const PosePair& pair);

PosePair load_pair(const PairPaths& paths);

}  // namespace gct::mesh
