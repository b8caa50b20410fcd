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

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gct/autodiff/array.hpp"

namespace gct::mesh {

using Vec3 = std::array<double, 3>;
using Face = std::array<std::uint32_t, 3>;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Triangle mesh with zero-based face indices. Immutable once built; the
/// constructor rejects out-of-range and degenerate faces.
class Mesh {
 public:
  Mesh(std::vector<Vec3> vertices, std::vector<Face> faces);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t face_count() const { return faces_.size(); }

  /// Same face list, new coordinates.
  Mesh with_vertices(std::vector<Vec3> vertices) const;

  friend bool operator==(const Mesh&, const Mesh&) = default;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
};

bool same_topology(const Mesh& a, const Mesh& b);

/// Coordinates as a 3 x V array (channel-major), the layout the network uses.
template <typename T>
ad::Array<T> to_array(const Mesh& mesh) {
  const std::size_t n = mesh.vertex_count();
  ad::Array<T> out({3, n});
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t k = 0; k < 3; ++k) out.data[k * n + v] = static_cast<T>(mesh.vertices()[v][k]);
  }
  return out;
}

/// Inverse of to_array; `values` is 3 x V channel-major.
template <typename T>
Mesh from_array(const ad::Array<T>& values, const Mesh& topology_source) {
  if (values.shape.size() != 2 || values.shape[0] != 3 || values.shape[1] != topology_source.vertex_count()) {
    throw MeshError("coordinate array " + ad::to_string(values.shape) + " does not match a mesh of " +
                    std::to_string(topology_source.vertex_count()) + " vertices");
  }
  const std::size_t n = topology_source.vertex_count();
  std::vector<Vec3> verts(n);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t k = 0; k < 3; ++k) verts[v][k] = static_cast<double>(values.data[k * n + v]);
  }
  return topology_source.with_vertices(std::move(verts));
}

/// Vertex reordering: vertex i of the input becomes vertex perm[i] of the
/// output and faces are relabelled accordingly.
Mesh permute_vertices(const Mesh& mesh, const std::vector<std::uint32_t>& perm);

std::vector<std::uint32_t> invert_permutation(const std::vector<std::uint32_t>& perm);

/// Throws MeshError unless perm is a bijection on [0, n).
void check_permutation(const std::vector<std::uint32_t>& perm, std::size_t n);

}  // namespace gct::mesh
