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
#include <random>
#include <stdexcept>
#include <string_view>

#include "gct/mesh/mesh.hpp"

namespace gct::synth {

class SynthError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ParamRange {
  std::string_view name;
  double lo;
  double hi;
};

inline constexpr std::size_t kIdentityDims = 10;
inline constexpr std::size_t kPoseDims = 12;

/// Bounds of the shape parameters (metres).
const std::array<ParamRange, kIdentityDims>& identity_ranges();
/// Joint limits in radians. Zero is the rest pose for every joint.
const std::array<ParamRange, kPoseDims>& pose_limits();

struct IdentityParams {
  std::array<double, kIdentityDims> alpha{};

  /// Midpoint of every range.
  static IdentityParams mean();
  void validate() const;
};

struct PoseParams {
  std::array<double, kPoseDims> beta{};

  static PoseParams rest() { return {}; }
  void validate() const;
};

/// Every body part is a capped tube of `rings` rings with `segments` vertices
/// each plus two pole vertices.
struct Resolution {
  std::size_t segments = 7;
  std::size_t rings = 4;

  std::size_t vertex_count() const;
  void validate() const;
};

inline constexpr std::size_t kBodyParts = 10;

/// Bound on max vertex displacement per unit change of the pose vector
/// (Euclidean norm, radians) for in-range parameters.
inline constexpr double kPoseLipschitz = 6.0;

/// Articulated capsule body: torso, head, two two-segment arms and legs,
/// posed by forward kinematics from the pelvis. The face list depends only
/// on the resolution.
mesh::Mesh generate_mesh(const IdentityParams& identity, const PoseParams& pose, const Resolution& res = {});

/// Two disjoint pose distributions. Wide-swing poses keep every joint at
/// least 35% of its range away from rest; small-angle poses stay within 20%.
enum class PoseRegime { performed, spontaneous };

std::string_view to_string(PoseRegime regime);
PoseRegime parse_regime(std::string_view text);

IdentityParams sample_identity(std::mt19937_64& rng);
PoseParams sample_pose(std::mt19937_64& rng, PoseRegime regime);

}  // namespace gct::synth
