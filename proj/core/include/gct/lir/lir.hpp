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
#include <stdexcept>
#include <string>
#include <vector>

#include "gct/mesh/mesh.hpp"
#include "gct/model/params.hpp"

namespace gct::lir {

class LirError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LirConfig {
  double theta = 0.05;
  std::size_t max_iters = 10;
  std::uint64_t sample_seed = 0;
  /// When set, a regenerated mesh replaces the current one only if it lowers
  /// the gap; otherwise the pass is spent and another partner is drawn. When
  /// clear, every pass replaces the mesh.
  bool keep_improvements_only = true;

  void validate() const;
};

struct LirMeshReport {
  std::size_t iterations = 0;  // network passes run
  std::size_t accepted = 0;    // passes whose output was kept
  double initial_gap = 0.0;
  double final_gap = 0.0;
  bool converged = false;
};

struct LirReport {
  double theta = 0.0;
  std::vector<LirMeshReport> meshes;

  double mean_initial_gap() const;
  double mean_final_gap() const;
};

/// Tab-separated table: mesh, iterations, accepted, initial_gap, final_gap, converged.
std::string format_report(const LirReport& report);

/// Encoder embedding max-reduced over vertices. The mesh is taken as given;
/// callers normalise it first.
std::vector<float> latent_pose_code(const mesh::Mesh& mesh, const model::ModelParams<float>& params);

double code_distance(const std::vector<float>& a, const std::vector<float>& b);

struct LirResult {
  std::vector<mesh::Mesh> meshes;  // in each mesh's own unit-cube frame
  LirReport report;
};

/// Iteratively regenerates every target mesh, each time paired with a target
/// drawn uniformly at random from the set, until its latent code lies within
/// theta of the source mesh's code or max_iters passes have run. Every mesh
/// and the source are first normalised to their own unit-cube frames.
LirResult lir_normalize(const std::vector<mesh::Mesh>& targets, const mesh::Mesh& source,
                        const model::ModelParams<float>& params, const LirConfig& config);

}  // namespace gct::lir
