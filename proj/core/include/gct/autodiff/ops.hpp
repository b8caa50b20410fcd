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

#include <cstddef>

#include "gct/autodiff/tape.hpp"

namespace gct::ad {

/// out[c,v] = sum_i weight[c,i] * x[i,v] + bias[c]. A 1x1 convolution along
/// the vertex axis.
template <typename T>
Var<T> per_vertex_linear(const Var<T>& x, const Var<T>& weight, const Var<T>& bias);

/// Per-channel standardisation over the vertex axis, biased variance, no affine.
template <typename T>
Var<T> instance_norm(const Var<T>& x, T eps = T(1e-5));

/// Row-wise softmax; each query row distributes its weight over the keys.
template <typename T>
Var<T> softmax_over_keys(const Var<T>& scores);

template <typename T>
Var<T> batched_matmul(const Var<T>& a, const Var<T>& b);

template <typename T>
Var<T> transpose(const Var<T>& a);

enum class Activation { relu, tanh };

template <typename T>
Var<T> activation(const Var<T>& x, Activation kind);

template <typename T>
Var<T> relu(const Var<T>& x) {
  return activation(x, Activation::relu);
}

template <typename T>
Var<T> tanh(const Var<T>& x) {
  return activation(x, Activation::tanh);
}

/// gamma * att_out + residual, with gamma a 1-element tensor.
template <typename T>
Var<T> scale_and_add(const Var<T>& att_out, const Var<T>& gamma, const Var<T>& residual);

/// Adaptive max pooling of the vertex axis into target_v windows. Window j
/// covers [floor(j*V/target_v), floor((j+1)*V/target_v)). Ties go to the
/// first index.
template <typename T>
Var<T> max_over_vertices(const Var<T>& x, std::size_t target_v);

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b);

/// Elementwise product.
template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b);

template <typename T>
Var<T> scale(const Var<T>& x, T factor);

/// Sum of all elements as a 1-element tensor.
template <typename T>
Var<T> sum(const Var<T>& x);

}  // namespace gct::ad
