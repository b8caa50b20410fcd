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

#include "gct/mesh/pair.hpp"
#include "gct/model/params.hpp"

namespace gct::harness {

struct PmdReport {
  std::vector<double> per_pair;  // raw model units
  double mean = 0.0;
};

/// PMD of each prediction against its ground truth.
PmdReport pmd_report(const std::vector<mesh::Mesh>& predictions, const std::vector<mesh::Mesh>& ground_truths);

/// Transfers every pair and scores it in the identity mesh's normalised frame.
PmdReport evaluate(const model::ModelParams<float>& params, const std::vector<mesh::PosePair>& pairs);

/// Plain-text table: pair, raw PMD, PMD in units of 1e-4; then a mean row.
std::string format_report(const PmdReport& report, const std::string& split);

/// Normalises both inputs in the identity mesh's frame, runs the network and
/// maps the result back to the identity's coordinates.
mesh::Mesh transfer_mesh(const model::ModelParams<float>& params, const mesh::Mesh& identity, const mesh::Mesh& pose);

/// File-level transfer: checkpoint + two OBJs in, one OBJ out.
void transfer(const std::filesystem::path& checkpoint, const std::filesystem::path& identity_obj,
              const std::filesystem::path& pose_obj, const std::filesystem::path& out_obj);

}  // namespace gct::harness
