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
#include <filesystem>
#include <vector>

#include "gct/mesh/mesh.hpp"
#include "gct/mesh/pair.hpp"
#include "gct/synth/body.hpp"

namespace gct::synth {

struct SplitSpec {
  std::size_t n_identities = 8;  // training identities
  std::size_t n_poses = 40;      // training poses
  std::size_t held_out_identities = 2;
  std::size_t held_out_poses = 8;
  std::size_t test_pairs = 16;  // per test split
  PoseRegime regime = PoseRegime::performed;
  Resolution resolution;

  void validate() const;
};

/// Indices into DatasetSplit::identities / poses. The pair asks for
/// `identity` in `pose`; the identity donor is shown in `identity_pose` and
/// the pose donor has identity `pose_donor`.
struct PairRecord {
  std::size_t identity = 0;
  std::size_t identity_pose = 0;
  std::size_t pose_donor = 0;
  std::size_t pose = 0;
  friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

struct PairSets {
  std::vector<mesh::PosePair> train, seen, unseen;
};

/// Training identities are [0, n_identities), held-out ones follow; likewise
/// for poses. Seen pairs combine held-out identities with training poses,
/// unseen pairs held-out identities with held-out poses.
struct DatasetSplit {
  SplitSpec spec;
  std::uint64_t seed = 0;
  std::vector<IdentityParams> identities;
  std::vector<PoseParams> poses;
  std::vector<PairRecord> train, seen, unseen;

  mesh::Mesh mesh(std::size_t identity, std::size_t pose) const;
  mesh::PosePair pair(const PairRecord& record) const;
  PairSets materialize() const;
};

DatasetSplit make_dataset(const SplitSpec& spec, std::uint64_t seed);

/// Writes meshes/, train.txt, seen.txt, unseen.txt and dataset.txt under `dir`.
void write_dataset(const DatasetSplit& split, const std::filesystem::path& dir);

/// Reads the three manifests written by write_dataset.
PairSets load_dataset(const std::filesystem::path& dir);

}  // namespace gct::synth
