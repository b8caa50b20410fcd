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

#include "gct/mesh/mesh.hpp"

namespace gct::mesh {

/// Affine map x -> (x - center) / scale.
struct Frame {
  Vec3 center{0.0, 0.0, 0.0};
  double scale = 1.0;
};

/// Largest extent of the bounding box is mapped onto [-margin, margin].
inline constexpr double kUnitCubeMargin = 0.95;

Frame unit_cube_frame(const Mesh& mesh);
Mesh apply_frame(const Mesh& mesh, const Frame& frame);
Mesh invert_frame(const Mesh& mesh, const Frame& frame);

struct NormalizedMesh {
  Mesh mesh;
  Frame frame;
};

NormalizedMesh normalize_to_unit_cube(const Mesh& mesh);

}  // namespace gct::mesh
