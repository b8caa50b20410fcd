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

#include "gct/mesh/topology.hpp"

#include <algorithm>

namespace gct::mesh {

VertexRings vertex_rings(const Mesh& mesh) {
  VertexRings rings;
  rings.neighbors.resize(mesh.vertex_count());
  for (const auto& face : mesh.faces()) {
    for (int k = 0; k < 3; ++k) {
      const auto a = face[k], b = face[(k + 1) % 3];
      rings.neighbors[a].push_back(b);
      rings.neighbors[b].push_back(a);
    }
  }
  for (auto& ring : rings.neighbors) {
    std::sort(ring.begin(), ring.end());
    ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
  }
  return rings;
}

EdgeSet edge_set(const Mesh& mesh) {
  EdgeSet edges;
  edges.reserve(mesh.face_count() * 3);
  for (const auto& face : mesh.faces()) {
    for (int k = 0; k < 3; ++k) {
      const auto a = face[k], b = face[(k + 1) % 3];
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace gct::mesh
