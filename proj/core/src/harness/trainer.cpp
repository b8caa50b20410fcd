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

#include "gct/harness/trainer.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include "gct/losses/losses.hpp"
#include "gct/mesh/normalize.hpp"
#include "gct/mesh/topology.hpp"
#include "gct/model/checkpoint.hpp"
#include "gct/model/network.hpp"

namespace gct::harness {
namespace {

std::vector<std::uint32_t> random_permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

mesh::PosePair permute_pair(const mesh::PosePair& pair, const std::vector<std::uint32_t>& perm) {
  return {mesh::permute_vertices(pair.identity, perm), mesh::permute_vertices(pair.pose, perm),
          mesh::permute_vertices(pair.ground_truth, perm)};
}

}  // namespace

std::string format_metrics_line(const EpochMetrics& m) {
  return fmt::format("{}\t{:.9g}\t{:.9g}\t{:.9g}\t{:.9g}\t{:.9g}", m.epoch, m.lr, m.full, m.rec, m.edge, m.cgc);
}

StepLoss accumulate_pair_gradient(const model::ModelParams<float>& params, const mesh::PosePair& pair,
                                  const losses::LossWeights& weights, float weight, Gradients& grads) {
  const auto frame = mesh::unit_cube_frame(pair.identity);
  const auto identity = mesh::apply_frame(pair.identity, frame);
  const auto pose = mesh::apply_frame(pair.pose, frame);
  const auto gt = mesh::apply_frame(pair.ground_truth, frame);
  const auto rings = mesh::vertex_rings(gt);
  const auto edges = mesh::edge_set(gt);

  ad::Tape<float> tape;
  const auto bound = model::bind(tape, params);
  const auto out = model::forward(bound, tape.constant(mesh::to_array<float>(identity)),
                                  tape.constant(mesh::to_array<float>(pose)));
  const auto terms = losses::full_loss(out.output, tape.constant(mesh::to_array<float>(gt)), edges, rings, weights);
  tape.backward(terms.total);

  for (std::size_t i = 0; i < bound.leaves.size(); ++i) {
    const auto g = bound.leaves[i].grad();
    if (g.empty()) continue;
    auto& acc = grads[i];
    for (std::size_t j = 0; j < g.size(); ++j) acc[j] += weight * g[j];
  }
  return {terms.total.item(), terms.rec.item(), terms.edge.item(), terms.cgc.item()};
}

TrainResult train(const TrainConfig& config, const std::vector<mesh::PosePair>& pairs,
                  const std::filesystem::path& out_dir, const TrainHooks& hooks) {
  config.validate();
  return train_from(config, model::init_params(config.model, config.seed), pairs, out_dir, hooks);
}

TrainResult train_from(const TrainConfig& config, model::ModelParams<float> params,
                       const std::vector<mesh::PosePair>& pairs, const std::filesystem::path& out_dir,
                       const TrainHooks& hooks) {
  config.validate();
  if (pairs.empty()) throw TrainError("no training pairs");
  if (!(params.config == config.model)) throw TrainError("parameters were built for a different model config");
  for (const auto& p : pairs) mesh::check_pair(p);

  std::ofstream metrics;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    metrics.open(out_dir / "metrics.tsv", std::ios::binary);
    std::ofstream(out_dir / "config.txt", std::ios::binary) << config.to_kv();
    if (!metrics) throw TrainError("cannot write metrics log in " + out_dir.string());
  }

  // Separate streams so the pair order does not depend on the vertex shuffles.
  std::mt19937_64 order_rng(config.seed ^ 0x9E3779B97F4A7C15ull);
  std::mt19937_64 shuffle_rng(config.seed ^ 0xC2B2AE3D27D4EB4Full);

  TrainResult result;
  auto state = OptimizerState::for_params(params, config.adam);
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const double lr = config.lr_at(epoch);
    std::shuffle(order.begin(), order.end(), order_rng);
    const std::size_t n = config.pairs_per_epoch == 0 ? order.size() : std::min(order.size(), config.pairs_per_epoch);

    EpochMetrics m;
    m.epoch = epoch;
    m.lr = lr;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t end = std::min(n, start + config.batch_size);
      auto grads = zero_gradients(params);
      const float weight = 1.0f / static_cast<float>(end - start);
      for (std::size_t i = start; i < end; ++i) {
        const auto& pair = pairs[order[i]];
        StepLoss loss;
        if (config.shuffle_vertices) {
          const auto perm = random_permutation(pair.identity.vertex_count(), shuffle_rng);
          loss = accumulate_pair_gradient(params, permute_pair(pair, perm), config.weights, weight, grads);
        } else {
          loss = accumulate_pair_gradient(params, pair, config.weights, weight, grads);
        }
        m.full += loss.full;
        m.rec += loss.rec;
        m.edge += loss.edge;
        m.cgc += loss.cgc;
      }
      adam_step(params, grads, state, lr);
    }
    const double count = static_cast<double>(n);
    m.full /= count;
    m.rec /= count;
    m.edge /= count;
    m.cgc /= count;
    result.log.push_back(m);
    if (metrics.is_open()) metrics << format_metrics_line(m) << '\n' << std::flush;
    if (hooks.on_epoch) hooks.on_epoch(m);

    if (!out_dir.empty() && config.checkpoint_interval > 0 && epoch % config.checkpoint_interval == 0) {
      model::save_checkpoint(params, out_dir / fmt::format("epoch{:05}.gctf", epoch));
    }
  }

  if (!out_dir.empty()) {
    result.checkpoint = out_dir / "model.gctf";
    model::save_checkpoint(params, result.checkpoint);
  }
  result.params = std::move(params);
  return result;
}

}  // namespace gct::harness
