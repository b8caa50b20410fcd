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

#include "gct/mesh/normalize.hpp"

#include <algorithm>
#include <limits>

namespace gct::mesh {

Frame unit_cube_frame(const Mesh& mesh) {
  Vec3 lo, hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& v : mesh.vertices()) {
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], v[k]);
      hi[k] = std::max(hi[k], v[k]);
    }
  }
  Frame frame;
  double extent = 0.0;
  for (int k = 0; k < 3; ++k) {
    frame.center[k] = 0.5 * (lo[k] + hi[k]);
    extent = std::max(extent, hi[k] - lo[k]);
  }
  if (!(extent > 0.0)) throw MeshError("mesh has a zero bounding-box extent");
  frame.scale = extent / (2.0 * kUnitCubeMargin);
  return frame;
}

Mesh apply_frame(const Mesh& mesh, const Frame& frame) {
  auto verts = mesh.vertices();
  for (auto& v : verts) {
    for (int k = 0; k < 3; ++k) v[k] = (v[k] - frame.center[k]) / frame.scale;
  }
  return mesh.with_vertices(std::move(verts));
}

Mesh invert_frame(const Mesh& mesh, const Frame& frame) {
  auto verts = mesh.vertices();
  for (auto& v : verts) {
    for (int k = 0; k < 3; ++k) v[k] = v[k] * frame.scale + frame.center[k];
  }
  return mesh.with_vertices(std::move(verts));
}

NormalizedMesh normalize_to_unit_cube(const Mesh& mesh) {
  const Frame frame = unit_cube_frame(mesh);
  return {apply_frame(mesh, frame), frame};
}

}  // namespace gct::mesh
