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

#include "gct/lir/lir.hpp"

#include <fmt/format.h>

#include <cmath>
#include <random>

#include "gct/mesh/normalize.hpp"
#include "gct/model/network.hpp"

namespace gct::lir {

void LirConfig::validate() const {
  if (!(theta > 0.0)) throw LirError(fmt::format("theta must be positive, got {}", theta));
  if (max_iters < 1) throw LirError("max_iters must be at least 1");
}

namespace {

double mean_of(const std::vector<LirMeshReport>& meshes, double LirMeshReport::*field) {
  if (meshes.empty()) return 0.0;
  double total = 0.0;
  for (const auto& m : meshes) total += m.*field;
  return total / static_cast<double>(meshes.size());
}

}  // namespace

double LirReport::mean_initial_gap() const { return mean_of(meshes, &LirMeshReport::initial_gap); }
double LirReport::mean_final_gap() const { return mean_of(meshes, &LirMeshReport::final_gap); }

std::string format_report(const LirReport& report) {
  std::string out =
      fmt::format("# theta={:.9g}\nmesh\titerations\taccepted\tinitial_gap\tfinal_gap\tconverged\n", report.theta);
  for (std::size_t i = 0; i < report.meshes.size(); ++i) {
    const auto& m = report.meshes[i];
    out += fmt::format("{}\t{}\t{}\t{:.9g}\t{:.9g}\t{}\n", i, m.iterations, m.accepted, m.initial_gap, m.final_gap,
                       m.converged ? "yes" : "no");
  }
  out += fmt::format("mean\t-\t-\t{:.9g}\t{:.9g}\t-\n", report.mean_initial_gap(), report.mean_final_gap());
  return out;
}

std::vector<float> latent_pose_code(const mesh::Mesh& mesh, const model::ModelParams<float>& params) {
  return model::run_latent_code(params, mesh);
}

double code_distance(const std::vector<float>& a, const std::vector<float>& b) {
  if (a.size() != b.size()) throw LirError("latent codes differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    total += d * d;
  }
  return std::sqrt(total);
}

LirResult lir_normalize(const std::vector<mesh::Mesh>& targets, const mesh::Mesh& source,
                        const model::ModelParams<float>& params, const LirConfig& config) {
  config.validate();
  if (targets.empty()) throw LirError("empty target set");
  for (const auto& t : targets) {
    if (!mesh::same_topology(t, source)) throw LirError("target and source meshes differ in topology");
  }

  const auto source_code = latent_pose_code(mesh::normalize_to_unit_cube(source).mesh, params);
  std::vector<mesh::Mesh> normalized;
  normalized.reserve(targets.size());
  for (const auto& t : targets) normalized.push_back(mesh::normalize_to_unit_cube(t).mesh);

  LirResult result;
  result.report.theta = config.theta;
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    // Per-mesh stream: results do not depend on processing order.
    std::seed_seq seq{static_cast<std::uint32_t>(config.sample_seed), static_cast<std::uint32_t>(config.sample_seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> pick(0, normalized.size() - 1);

    mesh::Mesh current = normalized[i];
    LirMeshReport rep;
    rep.initial_gap = code_distance(latent_pose_code(current, params), source_code);
    double gap = rep.initial_gap;
    while (!(gap < config.theta) && rep.iterations < config.max_iters) {
      const auto& partner = normalized[pick(rng)];
      auto candidate = model::run_forward(params, current, partner);
      const double candidate_gap = code_distance(latent_pose_code(candidate, params), source_code);
      ++rep.iterations;
      if (config.keep_improvements_only && !(candidate_gap < gap)) continue;
      current = std::move(candidate);
      gap = candidate_gap;
      ++rep.accepted;
    }
    rep.final_gap = gap;
    rep.converged = gap < config.theta;
    result.report.meshes.push_back(rep);
    result.meshes.push_back(std::move(current));
  }
  return result;
}

}  // namespace gct::lir
