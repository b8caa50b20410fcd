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

#include "gct/synth/body.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <string>

namespace gct::synth {
namespace {

enum Alpha : std::size_t {
  kTorsoLength,
  kTorsoRadius,
  kHeadRadius,
  kShoulderHalfWidth,
  kUpperArmLength,
  kForearmLength,
  kArmRadius,
  kThighLength,
  kShinLength,
  kLegRadius,
};

enum Beta : std::size_t {
  kSpineBend,
  kSpineTwist,
  kLeftShoulderFlex,
  kLeftShoulderAbduct,
  kRightShoulderFlex,
  kRightShoulderAbduct,
  kLeftElbow,
  kRightElbow,
  kLeftHipFlex,
  kRightHipFlex,
  kLeftKnee,
  kRightKnee,
};

using Eigen::Matrix3d;
using Eigen::Vector3d;

Matrix3d rot_x(double a) { return Eigen::AngleAxisd(a, Vector3d::UnitX()).toRotationMatrix(); }
Matrix3d rot_y(double a) { return Eigen::AngleAxisd(a, Vector3d::UnitY()).toRotationMatrix(); }
Matrix3d rot_z(double a) { return Eigen::AngleAxisd(a, Vector3d::UnitZ()).toRotationMatrix(); }

struct Part {
  Vector3d start;
  Matrix3d frame;
  Vector3d direction;  // in the part frame
  double length;
  double radius;
  bool mirrored;       // right-hand side parts use a reflected cross-section
};

void emit_part(const Part& part, const Resolution& res, std::vector<mesh::Vec3>& verts,
               std::vector<mesh::Face>& faces) {
  const auto base = static_cast<std::uint32_t>(verts.size());
  const Vector3d axis = part.frame * part.direction;
  const Vector3d u = (part.mirrored ? -1.0 : 1.0) * (part.frame * Vector3d::UnitX());
  const Vector3d w = part.frame * Vector3d::UnitZ();
  auto push = [&](const Vector3d& p) { verts.push_back({p.x(), p.y(), p.z()}); };

  push(part.start - 0.5 * part.radius * axis);
  for (std::size_t k = 0; k < res.rings; ++k) {
    const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(res.rings) * part.length;
    const Vector3d center = part.start + t * axis;
    for (std::size_t s = 0; s < res.segments; ++s) {
      const double phi = std::numbers::pi / 2 + 2 * std::numbers::pi * static_cast<double>(s) /
                                                    static_cast<double>(res.segments);
      push(center + part.radius * (std::cos(phi) * u + std::sin(phi) * w));
    }
  }
  push(part.start + (part.length + 0.5 * part.radius) * axis);

  const auto S = static_cast<std::uint32_t>(res.segments);
  const auto K = static_cast<std::uint32_t>(res.rings);
  auto ring = [&](std::uint32_t k, std::uint32_t s) { return base + 1 + k * S + (s % S); };
  const std::uint32_t top = base + 1 + K * S;
  auto add = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    if (part.mirrored) std::swap(b, c);
    faces.push_back({a, b, c});
  };
  for (std::uint32_t s = 0; s < S; ++s) {
    add(base, ring(0, s + 1), ring(0, s));
    for (std::uint32_t k = 0; k + 1 < K; ++k) {
      add(ring(k, s), ring(k, s + 1), ring(k + 1, s + 1));
      add(ring(k, s), ring(k + 1, s + 1), ring(k + 1, s));
    }
    add(top, ring(K - 1, s), ring(K - 1, s + 1));
  }
}

void check_ranges(std::string_view what, const double* values, const ParamRange* ranges, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!(values[i] >= ranges[i].lo && values[i] <= ranges[i].hi)) {
      throw SynthError(std::string(what) + " '" + std::string(ranges[i].name) + "' = " + std::to_string(values[i]) +
                       " outside [" + std::to_string(ranges[i].lo) + ", " + std::to_string(ranges[i].hi) + "]");
    }
  }
}

}  // namespace

const std::array<ParamRange, kIdentityDims>& identity_ranges() {
  static const std::array<ParamRange, kIdentityDims> ranges{{
      {"torso_length", 0.45, 0.65},
      {"torso_radius", 0.12, 0.20},
      {"head_radius", 0.09, 0.13},
      {"shoulder_half_width", 0.16, 0.24},
      {"upper_arm_length", 0.25, 0.35},
      {"forearm_length", 0.22, 0.32},
      {"arm_radius", 0.035, 0.06},
      {"thigh_length", 0.38, 0.50},
      {"shin_length", 0.36, 0.48},
      {"leg_radius", 0.05, 0.09},
  }};
  return ranges;
}

const std::array<ParamRange, kPoseDims>& pose_limits() {
  static const std::array<ParamRange, kPoseDims> limits{{
      {"spine_bend", -0.4, 0.8},
      {"spine_twist", -0.6, 0.6},
      {"left_shoulder_flex", -1.0, 1.6},
      {"left_shoulder_abduct", 0.0, 1.6},
      {"right_shoulder_flex", -1.0, 1.6},
      {"right_shoulder_abduct", 0.0, 1.6},
      {"left_elbow", 0.0, 2.5},
      {"right_elbow", 0.0, 2.5},
      {"left_hip_flex", -0.5, 1.6},
      {"right_hip_flex", -0.5, 1.6},
      {"left_knee", 0.0, 2.5},
      {"right_knee", 0.0, 2.5},
  }};
  return limits;
}

IdentityParams IdentityParams::mean() {
  IdentityParams p;
  for (std::size_t i = 0; i < kIdentityDims; ++i) p.alpha[i] = 0.5 * (identity_ranges()[i].lo + identity_ranges()[i].hi);
  return p;
}

void IdentityParams::validate() const { check_ranges("identity parameter", alpha.data(), identity_ranges().data(), kIdentityDims); }

void PoseParams::validate() const { check_ranges("joint angle", beta.data(), pose_limits().data(), kPoseDims); }

std::size_t Resolution::vertex_count() const { return kBodyParts * (segments * rings + 2); }

void Resolution::validate() const {
  if (segments < 3 || rings < 1) throw SynthError("resolution needs at least 3 segments and 1 ring");
}

mesh::Mesh generate_mesh(const IdentityParams& identity, const PoseParams& pose, const Resolution& res) {
  identity.validate();
  pose.validate();
  res.validate();
  const auto& a = identity.alpha;
  const auto& b = pose.beta;
  const Vector3d up = Vector3d::UnitY(), down = -Vector3d::UnitY();

  const Matrix3d spine = rot_y(b[kSpineTwist]) * rot_x(b[kSpineBend]);
  const double torso_len = a[kTorsoLength];
  const Vector3d neck = spine * Vector3d(0, torso_len, 0);

  std::vector<Part> parts;
  parts.push_back({Vector3d::Zero(), spine, up, torso_len, a[kTorsoRadius], false});
  parts.push_back({neck, spine, up, a[kHeadRadius], a[kHeadRadius], false});

  auto arm = [&](double side, std::size_t flex, std::size_t abduct, std::size_t elbow) {
    const Vector3d shoulder = spine * Vector3d(side * a[kShoulderHalfWidth], 0.92 * torso_len, 0);
    const Matrix3d upper = spine * rot_z(side * b[abduct]) * rot_x(-b[flex]);
    const Vector3d elbow_pos = shoulder + a[kUpperArmLength] * (upper * down);
    const Matrix3d fore = upper * rot_x(-b[elbow]);
    parts.push_back({shoulder, upper, down, a[kUpperArmLength], a[kArmRadius], side < 0});
    parts.push_back({elbow_pos, fore, down, a[kForearmLength], 0.85 * a[kArmRadius], side < 0});
  };
  arm(1.0, kLeftShoulderFlex, kLeftShoulderAbduct, kLeftElbow);
  arm(-1.0, kRightShoulderFlex, kRightShoulderAbduct, kRightElbow);

  auto leg = [&](double side, std::size_t hip, std::size_t knee) {
    const Vector3d hip_pos(side * 0.55 * a[kTorsoRadius], -0.05, 0);
    const Matrix3d thigh = rot_x(-b[hip]);
    const Vector3d knee_pos = hip_pos + a[kThighLength] * (thigh * down);
    const Matrix3d shin = thigh * rot_x(b[knee]);
    parts.push_back({hip_pos, thigh, down, a[kThighLength], a[kLegRadius], side < 0});
    parts.push_back({knee_pos, shin, down, a[kShinLength], 0.8 * a[kLegRadius], side < 0});
  };
  leg(1.0, kLeftHipFlex, kLeftKnee);
  leg(-1.0, kRightHipFlex, kRightKnee);

  std::vector<mesh::Vec3> verts;
  std::vector<mesh::Face> faces;
  verts.reserve(res.vertex_count());
  for (const auto& part : parts) emit_part(part, res, verts, faces);
  return mesh::Mesh(std::move(verts), std::move(faces));
}

std::string_view to_string(PoseRegime regime) {
  return regime == PoseRegime::performed ? "performed" : "spontaneous";
}

PoseRegime parse_regime(std::string_view text) {
  if (text == "performed") return PoseRegime::performed;
  if (text == "spontaneous") return PoseRegime::spontaneous;
  throw SynthError("unknown pose regime '" + std::string(text) + "'");
}

IdentityParams sample_identity(std::mt19937_64& rng) {
  IdentityParams p;
  for (std::size_t i = 0; i < kIdentityDims; ++i) {
    std::uniform_real_distribution<double> dist(identity_ranges()[i].lo, identity_ranges()[i].hi);
    p.alpha[i] = dist(rng);
  }
  return p;
}

PoseParams sample_pose(std::mt19937_64& rng, PoseRegime regime) {
  const double lo_frac = regime == PoseRegime::performed ? 0.35 : 0.0;
  const double hi_frac = regime == PoseRegime::performed ? 1.0 : 0.2;
  std::uniform_real_distribution<double> frac(lo_frac, hi_frac);
  std::bernoulli_distribution coin(0.5);
  PoseParams p;
  for (std::size_t i = 0; i < kPoseDims; ++i) {
    const auto& lim = pose_limits()[i];
    // Joints whose range is one-sided around rest always swing towards the open side.
    const bool positive = lim.lo >= 0.0 ? true : coin(rng);
    const double f = frac(rng);
    p.beta[i] = positive ? f * lim.hi : f * lim.lo;
  }
  return p;
}

}  // namespace gct::synth
