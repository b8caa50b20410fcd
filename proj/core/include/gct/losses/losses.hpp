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

#include <stdexcept>

#include "gct/autodiff/tape.hpp"
#include "gct/mesh/mesh.hpp"
#include "gct/mesh/topology.hpp"

namespace gct::losses {

class LossError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Coefficients of the training objective.
struct LossWeights {
  double lambda_rec = 1.0;
  double lambda_edge = 5e-4;
  double lambda_contra = 5e-4;

  void validate() const;
};

/// Floor applied to squared vector norms before the square root in gradients
/// of the edge and CGC terms.
inline constexpr double kNormFloor = 1e-12;

// All tensors below are 3 x V coordinate arrays.

/// Mean over vertices of the squared Euclidean distance.
template <typename T>
ad::Var<T> reconstruction_loss(const ad::Var<T>& pred, const ad::Var<T>& gt);

/// Mean over edges of (|pred_p - pred_q| - |gt_p - gt_q|)^2.
template <typename T>
ad::Var<T> edge_loss(const ad::Var<T>& pred, const ad::Var<T>& gt, const mesh::EdgeSet& edges);

/// Central geodesic contrastive loss: for every vertex p and every q in its
/// ring, the length of (pred_q - pred_p) - (gt_q - gt_p), summed and divided
/// by the vertex count. Undirected edges therefore count once per endpoint.
template <typename T>
ad::Var<T> cgc_loss(const ad::Var<T>& pred, const ad::Var<T>& gt, const mesh::VertexRings& rings);

template <typename T>
struct LossTerms {
  ad::Var<T> total;
  ad::Var<T> rec;
  ad::Var<T> edge;
  ad::Var<T> cgc;
};

template <typename T>
LossTerms<T> full_loss(const ad::Var<T>& pred, const ad::Var<T>& gt, const mesh::EdgeSet& edges,
                       const mesh::VertexRings& rings, const LossWeights& weights);

/// Point-wise mesh Euclidean distance: mean squared vertex displacement.
double pmd(const mesh::Mesh& pred, const mesh::Mesh& gt);

/// Scale factor of the customary PMD reporting unit (x 10^-4).
inline constexpr double kPmdReportUnit = 1e-4;

}  // namespace gct::losses
