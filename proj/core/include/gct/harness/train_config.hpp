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
#include <string>
#include <vector>

#include "gct/harness/kv_config.hpp"
#include "gct/losses/losses.hpp"
#include "gct/model/config.hpp"

namespace gct::harness {

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainConfig {
  std::size_t epochs = 1000;
  double learning_rate = 5e-5;
  std::vector<std::size_t> lr_milestones{200, 500};
  double lr_decay = 0.1;
  std::size_t batch_size = 8;
  losses::LossWeights weights;
  model::ModelConfig model;
  std::uint64_t seed = 0;
  /// Write a checkpoint every N epochs; 0 writes only the final one.
  std::size_t checkpoint_interval = 0;
  /// Pairs drawn per epoch from the shuffled training set; 0 uses all of them.
  std::size_t pairs_per_epoch = 0;
  /// Apply one shared random vertex permutation to each pair per step.
  bool shuffle_vertices = true;
  AdamHyper adam;

  void validate() const;

  /// Learning rate of 1-based `epoch`: decayed once for every milestone
  /// strictly below it.
  double lr_at(std::size_t epoch) const;

  static TrainConfig from_kv(const KeyValueConfig& kv);
  std::string to_kv() const;
};

}  // namespace gct::harness
