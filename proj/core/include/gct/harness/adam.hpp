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
#include <vector>

#include "gct/harness/train_config.hpp"
#include "gct/model/params.hpp"

namespace gct::harness {

class OptimizerError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Per-tensor gradients, shaped like ModelParams::tensors.
using Gradients = std::vector<std::vector<float>>;

Gradients zero_gradients(const model::ModelParams<float>& params);

struct OptimizerState {
  AdamHyper hyper;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::uint64_t step = 0;

  static OptimizerState for_params(const model::ModelParams<float>& params, const AdamHyper& hyper = {});
};

/// Bias-corrected Adam update.
void adam_step(model::ModelParams<float>& params, const Gradients& grads, OptimizerState& state, double lr);

}  // namespace gct::harness
