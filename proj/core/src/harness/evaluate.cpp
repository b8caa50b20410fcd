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

#include "gct/harness/evaluate.hpp"

#include <fmt/format.h>

#include <stdexcept>

#include "gct/losses/losses.hpp"
#include "gct/mesh/normalize.hpp"
#include "gct/mesh/obj_io.hpp"
#include "gct/model/checkpoint.hpp"
#include "gct/model/network.hpp"

namespace gct::harness {

PmdReport pmd_report(const std::vector<mesh::Mesh>& predictions, const std::vector<mesh::Mesh>& ground_truths) {
  if (predictions.empty()) throw std::invalid_argument("cannot evaluate an empty split");
  if (predictions.size() != ground_truths.size()) throw std::invalid_argument("prediction/ground-truth count mismatch");
  PmdReport report;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    report.per_pair.push_back(losses::pmd(predictions[i], ground_truths[i]));
  }
  double total = 0.0;
  for (double v : report.per_pair) total += v;
  report.mean = total / static_cast<double>(report.per_pair.size());
  return report;
}

PmdReport evaluate(const model::ModelParams<float>& params, const std::vector<mesh::PosePair>& pairs) {
  std::vector<mesh::Mesh> preds, gts;
  for (const auto& pair : pairs) {
    mesh::check_pair(pair);
    const auto frame = mesh::unit_cube_frame(pair.identity);
    preds.push_back(model::run_forward(params, mesh::apply_frame(pair.identity, frame),
                                       mesh::apply_frame(pair.pose, frame)));
    gts.push_back(mesh::apply_frame(pair.ground_truth, frame));
  }
  return pmd_report(preds, gts);
}

std::string format_report(const PmdReport& report, const std::string& split) {
  std::string out = fmt::format("# split={}\npair\tpmd\tpmd_x1e-4\n", split);
  for (std::size_t i = 0; i < report.per_pair.size(); ++i) {
    out += fmt::format("{}\t{:.9g}\t{:.6f}\n", i, report.per_pair[i], report.per_pair[i] / losses::kPmdReportUnit);
  }
  out += fmt::format("mean\t{:.9g}\t{:.6f}\n", report.mean, report.mean / losses::kPmdReportUnit);
  return out;
}

mesh::Mesh transfer_mesh(const model::ModelParams<float>& params, const mesh::Mesh& identity, const mesh::Mesh& pose) {
  if (!mesh::same_topology(identity, pose)) throw mesh::MeshError("identity and pose meshes differ in topology");
  const auto frame = mesh::unit_cube_frame(identity);
  const auto out = model::run_forward(params, mesh::apply_frame(identity, frame), mesh::apply_frame(pose, frame));
  return mesh::invert_frame(out, frame);
}

void transfer(const std::filesystem::path& checkpoint, const std::filesystem::path& identity_obj,
              const std::filesystem::path& pose_obj, const std::filesystem::path& out_obj) {
  const auto params = model::load_checkpoint(checkpoint);
  mesh::save_obj(transfer_mesh(params, mesh::load_obj(identity_obj), mesh::load_obj(pose_obj)), out_obj);
}

}  // namespace gct::harness
