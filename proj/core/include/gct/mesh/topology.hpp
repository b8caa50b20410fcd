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
#include <utility>
#include <vector>

#include "gct/mesh/mesh.hpp"

namespace gct::mesh {

/// One-ring neighbours per vertex, ascending.
struct VertexRings {
  std::vector<std::vector<std::uint32_t>> neighbors;

  std::size_t size() const { return neighbors.size(); }
  const std::vector<std::uint32_t>& operator[](std::size_t v) const { return neighbors[v]; }
  friend bool operator==(const VertexRings&, const VertexRings&) = default;
};

/// Undirected edges (p, q) with p < q, sorted and deduplicated.
using EdgeSet = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

VertexRings vertex_rings(const Mesh& mesh);
EdgeSet edge_set(const Mesh& mesh);

}  // namespace gct::mesh
