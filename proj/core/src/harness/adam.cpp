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

#include "gct/harness/adam.hpp"

#include <cmath>
#include <string>

namespace gct::harness {

Gradients zero_gradients(const model::ModelParams<float>& params) {
  Gradients g;
  for (const auto& t : params.tensors) g.emplace_back(t.size(), 0.0f);
  return g;
}

OptimizerState OptimizerState::for_params(const model::ModelParams<float>& params, const AdamHyper& hyper) {
  OptimizerState s;
  s.hyper = hyper;
  for (const auto& t : params.tensors) {
    s.first_moment.emplace_back(t.size(), 0.0);
    s.second_moment.emplace_back(t.size(), 0.0);
  }
  return s;
}

void adam_step(model::ModelParams<float>& params, const Gradients& grads, OptimizerState& state, double lr) {
  if (grads.size() != params.tensors.size() || state.first_moment.size() != params.tensors.size()) {
    throw OptimizerError("gradients missing: expected " + std::to_string(params.tensors.size()) + " tensors, got " +
                         std::to_string(grads.size()));
  }
  ++state.step;
  const auto& h = state.hyper;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(h.beta1, t);
  const double c2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t i = 0; i < params.tensors.size(); ++i) {
    auto& w = params.tensors[i].data;
    const auto& g = grads[i];
    if (g.size() != w.size()) {
      throw OptimizerError("gradient of '" + params.names[i] + "' has " + std::to_string(g.size()) +
                           " entries, parameter has " + std::to_string(w.size()));
    }
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double gj = g[j];
      m[j] = h.beta1 * m[j] + (1.0 - h.beta1) * gj;
      v[j] = h.beta2 * v[j] + (1.0 - h.beta2) * gj * gj;
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      w[j] = static_cast<float>(static_cast<double>(w[j]) - lr * m_hat / (std::sqrt(v_hat) + h.eps));
    }
  }
}

}  // namespace gct::harness
