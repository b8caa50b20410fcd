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

#include <benchmark/benchmark.h>

#include <random>

#include "gct/autodiff/ops.hpp"
#include "gct/harness/adam.hpp"
#include "gct/harness/trainer.hpp"
#include "gct/mesh/normalize.hpp"
#include "gct/model/network.hpp"
#include "gct/synth/body.hpp"

namespace {

using namespace gct;

model::ModelConfig desk_config(model::Architecture arch) {
  auto c = arch == model::Architecture::lir ? model::ModelConfig::lir_default() : model::ModelConfig{};
  c.desk_scale_factor = 1.0 / 16.0;
  return c;
}

mesh::PosePair desk_pair() {
  std::mt19937_64 rng(3);
  const auto a = synth::sample_identity(rng);
  const auto b = synth::sample_identity(rng);
  const auto p = synth::sample_pose(rng, synth::PoseRegime::performed);
  const auto q = synth::sample_pose(rng, synth::PoseRegime::performed);
  return {synth::generate_mesh(a, p), synth::generate_mesh(b, q), synth::generate_mesh(a, q)};
}

void BM_Forward(benchmark::State& state) {
  const auto params = model::init_params(desk_config(model::Architecture::gc_transformer), 1);
  const auto pair = desk_pair();
  const auto frame = mesh::unit_cube_frame(pair.identity);
  const auto identity = mesh::apply_frame(pair.identity, frame);
  const auto pose = mesh::apply_frame(pair.pose, frame);
  for (auto _ : state) benchmark::DoNotOptimize(model::run_forward(params, identity, pose));
}
BENCHMARK(BM_Forward)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
  const auto arch = static_cast<model::Architecture>(state.range(0));
  const auto params = model::init_params(desk_config(arch), 1);
  const auto pair = desk_pair();
  auto grads = harness::zero_gradients(params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(harness::accumulate_pair_gradient(params, pair, {}, 1.0f, grads));
  }
  state.SetLabel(model::to_string(arch));
}
BENCHMARK(BM_ForwardBackward)
    ->Arg(static_cast<int>(model::Architecture::gc_transformer))
    ->Arg(static_cast<int>(model::Architecture::lir))
    ->Unit(benchmark::kMillisecond);

void BM_Attention(benchmark::State& state) {
  const auto v = static_cast<std::size_t>(state.range(0));
  const std::size_t c = 64;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  ad::Array<float> q({c, v}), k({c, v});
  for (auto& x : q.data) x = dist(rng);
  for (auto& x : k.data) x = dist(rng);
  for (auto _ : state) {
    ad::Tape<float> tape;
    const auto a = ad::softmax_over_keys(ad::batched_matmul(ad::transpose(tape.leaf(q)), tape.leaf(k)));
    tape.backward(ad::sum(a));
    benchmark::DoNotOptimize(a.value().data());
  }
}
BENCHMARK(BM_Attention)->Arg(300)->Arg(1200)->Unit(benchmark::kMillisecond);

void BM_GenerateMesh(benchmark::State& state) {
  std::mt19937_64 rng(9);
  const auto a = synth::sample_identity(rng);
  const auto p = synth::sample_pose(rng, synth::PoseRegime::performed);
  for (auto _ : state) benchmark::DoNotOptimize(synth::generate_mesh(a, p));
}
BENCHMARK(BM_GenerateMesh);

}  // namespace

BENCHMARK_MAIN();
