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
#include <functional>
#include <string>
#include <vector>

#include "gct/harness/adam.hpp"
#include "gct/harness/train_config.hpp"
#include "gct/mesh/pair.hpp"
#include "gct/model/params.hpp"

namespace gct::harness {

class TrainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  double lr = 0;
  double full = 0;
  double rec = 0;
  double edge = 0;
  double cgc = 0;
};

/// Tab-separated: epoch, lr, full_loss, rec, edge, cgc.
std::string format_metrics_line(const EpochMetrics& m);

struct StepLoss {
  double full = 0, rec = 0, edge = 0, cgc = 0;
};

/// Forward + backward of one pair (already permuted); adds the gradients,
/// multiplied by `weight`, into `grads`.
StepLoss accumulate_pair_gradient(const model::ModelParams<float>& params, const mesh::PosePair& pair,
                                  const losses::LossWeights& weights, float weight, Gradients& grads);

struct TrainResult {
  model::ModelParams<float> params;
  std::vector<EpochMetrics> log;
  std::filesystem::path checkpoint;  // empty when no output directory was given
};

struct TrainHooks {
  std::function<void(const EpochMetrics&)> on_epoch;
};

/// Trains from freshly initialised parameters (seeded by config.seed). When
/// `out_dir` is non-empty, writes metrics.tsv, config.txt and checkpoints
/// there; the final checkpoint is model.gctf.
TrainResult train(const TrainConfig& config, const std::vector<mesh::PosePair>& pairs,
                  const std::filesystem::path& out_dir = {}, const TrainHooks& hooks = {});

/// Continues training from given parameters.
TrainResult train_from(const TrainConfig& config, model::ModelParams<float> params,
                       const std::vector<mesh::PosePair>& pairs, const std::filesystem::path& out_dir = {},
                       const TrainHooks& hooks = {});

}  // namespace gct::harness
