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

#include "gct/mesh/mesh.hpp"

#include <string>

namespace gct::mesh {

Mesh::Mesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  if (faces_.empty()) throw MeshError("mesh has no faces");
  const auto n = vertices_.size();
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& face = faces_[f];
    for (auto idx : face) {
      if (idx >= n) {
        throw MeshError("face " + std::to_string(f) + " references vertex " + std::to_string(idx) +
                        " of " + std::to_string(n));
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      throw MeshError("face " + std::to_string(f) + " repeats a vertex index");
    }
  }
}

Mesh Mesh::with_vertices(std::vector<Vec3> vertices) const {
  if (vertices.size() != vertices_.size()) {
    throw MeshError("vertex count changed from " + std::to_string(vertices_.size()) + " to " +
                    std::to_string(vertices.size()));
  }
  Mesh out = *this;
  out.vertices_ = std::move(vertices);
  return out;
}

bool same_topology(const Mesh& a, const Mesh& b) {
  return a.vertex_count() == b.vertex_count() && a.faces() == b.faces();
}

void check_permutation(const std::vector<std::uint32_t>& perm, std::size_t n) {
  if (perm.size() != n) {
    throw MeshError("permutation has " + std::to_string(perm.size()) + " entries for " + std::to_string(n) +
                    " vertices");
  }
  std::vector<bool> seen(n, false);
  for (auto p : perm) {
    if (p >= n || seen[p]) throw MeshError("permutation is not a bijection");
    seen[p] = true;
  }
}

std::vector<std::uint32_t> invert_permutation(const std::vector<std::uint32_t>& perm) {
  check_permutation(perm, perm.size());
  std::vector<std::uint32_t> inv(perm.size());
  for (std::uint32_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
  return inv;
}

Mesh permute_vertices(const Mesh& mesh, const std::vector<std::uint32_t>& perm) {
  check_permutation(perm, mesh.vertex_count());
  std::vector<Vec3> verts(mesh.vertex_count());
  for (std::size_t i = 0; i < perm.size(); ++i) verts[perm[i]] = mesh.vertices()[i];
  std::vector<Face> faces = mesh.faces();
  for (auto& face : faces) {
    for (auto& idx : face) idx = perm[idx];
  }
  return Mesh(std::move(verts), std::move(faces));
}

}  // namespace gct::mesh
