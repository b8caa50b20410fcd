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
#include <string>
#include <vector>

#include "gct/autodiff/tape.hpp"
#include "gct/mesh/mesh.hpp"
#include "gct/model/config.hpp"
#include "gct/model/params.hpp"

namespace gct::model {

// Parameter slots. Each struct holds indices into ModelParams::tensors.
struct LinearSlot {
  std::size_t weight = 0;
  std::size_t bias = 0;
};

struct NormBlockSlot {
  LinearSlot scale;
  LinearSlot shift;
};

struct DecoderSlot {
  LinearSlot query, key, value;
  std::size_t gamma = 0;
  std::array<NormBlockSlot, 3> norms;
  std::array<LinearSlot, 3> convs;
};

/// Parameter layout of a configuration, in declaration order.
struct Layout {
  std::vector<LinearSlot> identity_encoder;
  std::vector<LinearSlot> pose_encoder;  // empty for the lir architecture
  LinearSlot identity_in, pose_in;       // gc_transformer only
  std::vector<DecoderSlot> decoders;
  std::vector<LinearSlot> identity_reduce;  // gc_transformer only
  std::vector<LinearSlot> pose_reduce;
  LinearSlot head;

  std::vector<std::string> names;
  std::vector<ad::Shape> shapes;
};

Layout build_layout(const ModelConfig& config);

// Tape-bound views of the parameters.
template <typename T>
struct LinearVars {
  ad::Var<T> weight, bias;
};

template <typename T>
struct NormBlockVars {
  LinearVars<T> scale, shift;
};

template <typename T>
struct AttentionVars {
  LinearVars<T> query, key, value;
  ad::Var<T> gamma;
};

template <typename T>
struct DecoderVars {
  AttentionVars<T> attention;
  std::array<NormBlockVars<T>, 3> norms;
  std::array<LinearVars<T>, 3> convs;
};

template <typename T>
struct BoundModel {
  ModelConfig config;
  std::vector<ad::Var<T>> leaves;  // one per parameter tensor, same order
  std::vector<LinearVars<T>> identity_encoder, pose_encoder;
  LinearVars<T> identity_in, pose_in;
  std::vector<DecoderVars<T>> decoders;
  std::vector<LinearVars<T>> identity_reduce, pose_reduce;
  LinearVars<T> head;
};

/// Registers every parameter tensor as a leaf on `tape`.
template <typename T>
BoundModel<T> bind(ad::Tape<T>& tape, const ModelParams<T>& params, bool requires_grad = true);

template <typename T>
ad::Var<T> linear(const ad::Var<T>& x, const LinearVars<T>& layer);

/// Stack of [linear -> instance norm -> relu]; keeps the vertex axis intact.
template <typename T>
ad::Var<T> encode(const ad::Var<T>& xyz, const std::vector<LinearVars<T>>& layers);

template <typename T>
struct AttentionResult {
  ad::Var<T> output;   // gamma * (v A^T) + z_pose
  ad::Var<T> weights;  // A, pose vertices x identity vertices
};

/// Queries come from the pose embedding, keys and values from the identity
/// embedding. Scores are q^T k without scaling; softmax runs over keys.
template <typename T>
AttentionResult<T> cross_attention(const ad::Var<T>& z_pose, const ad::Var<T>& z_id,
                                   const AttentionVars<T>& vars);

/// Instance norm of z, modulated per vertex by scale/shift maps of the
/// conditioning coordinates.
template <typename T>
ad::Var<T> norm_block(const ad::Var<T>& z, const ad::Var<T>& cond_xyz, const NormBlockVars<T>& vars);

template <typename T>
struct DecoderResult {
  ad::Var<T> output;
  ad::Var<T> attention;  // invalid when the attention branch is disabled
};

template <typename T>
DecoderResult<T> decoder_block(const ad::Var<T>& z_pose, const ad::Var<T>& z_id, const ad::Var<T>& cond_xyz,
                               const DecoderVars<T>& vars, bool attention_enabled);

template <typename T>
struct ForwardResult {
  ad::Var<T> output;                   // 3 x V, inside (-1, 1)
  std::vector<ad::Var<T>> attention;  // one matrix per decoder with attention enabled
};

/// Full network on normalised 3 x V coordinates. For the lir architecture
/// `pose_xyz` is the sampled partner mesh.
template <typename T>
ForwardResult<T> forward(const BoundModel<T>& model, const ad::Var<T>& identity_xyz, const ad::Var<T>& pose_xyz);

/// Latent embedding of the pose path, max-reduced over vertices.
template <typename T>
ad::Var<T> latent_code(const BoundModel<T>& model, const ad::Var<T>& xyz);

/// Convenience: evaluates the network on a frozen tape. Inputs must already
/// be normalised; the result reuses the identity mesh's faces.
mesh::Mesh run_forward(const ModelParams<float>& params, const mesh::Mesh& identity, const mesh::Mesh& pose);

std::vector<float> run_latent_code(const ModelParams<float>& params, const mesh::Mesh& mesh);

}  // namespace gct::model
