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

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#if defined(__GLIBC__)
#include <malloc.h>
#endif
#include <fstream>
#include <iostream>
#include <optional>

#include "gct/harness/evaluate.hpp"
#include "gct/harness/gradcheck.hpp"
#include "gct/harness/kv_config.hpp"
#include "gct/harness/train_config.hpp"
#include "gct/harness/trainer.hpp"
#include "gct/lir/lir.hpp"
#include "gct/mesh/normalize.hpp"
#include "gct/mesh/obj_io.hpp"
#include "gct/model/checkpoint.hpp"
#include "gct/synth/dataset.hpp"

namespace fs = std::filesystem;
using namespace gct;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out_dir = ".";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed (overrides the config file)");
  cmd->add_option("--config", c.config, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out-dir", c.out_dir, "Output directory");
}

harness::KeyValueConfig load_kv(const Common& c) {
  return c.config.empty() ? harness::KeyValueConfig{} : harness::KeyValueConfig::load(c.config);
}

void reject_unused(const harness::KeyValueConfig& kv) {
  if (auto unused = kv.unused_keys(); !unused.empty()) {
    throw harness::ConfigFileError(fmt::format("unknown config key '{}'", unused.front()));
  }
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

int run_synth(const Common& c) {
  const auto kv = load_kv(c);
  synth::SplitSpec spec;
  spec.n_identities = kv.get_size("identities", spec.n_identities);
  spec.n_poses = kv.get_size("poses", spec.n_poses);
  spec.held_out_identities = kv.get_size("held_out_identities", spec.held_out_identities);
  spec.held_out_poses = kv.get_size("held_out_poses", spec.held_out_poses);
  spec.test_pairs = kv.get_size("test_pairs", spec.test_pairs);
  spec.regime = synth::parse_regime(kv.get_string("regime", std::string(synth::to_string(spec.regime))));
  spec.resolution.segments = kv.get_size("segments", spec.resolution.segments);
  spec.resolution.rings = kv.get_size("rings", spec.resolution.rings);
  const std::uint64_t seed = c.seed.value_or(kv.get_size("seed", 0));
  reject_unused(kv);

  const auto split = synth::make_dataset(spec, seed);
  synth::write_dataset(split, c.out_dir);
  fmt::print("wrote {} train, {} seen, {} unseen pairs to {}\n", split.train.size(), split.seen.size(),
             split.unseen.size(), c.out_dir);
  return 0;
}

int run_train(const Common& c, const std::string& data) {
  auto kv = load_kv(c);
  if (c.seed) kv.set("seed", std::to_string(*c.seed));
  const auto config = harness::TrainConfig::from_kv(kv);
  const auto pairs = synth::load_dataset(data).train;
  fmt::print("training {} on {} pairs for {} epochs\n", model::to_string(config.model.architecture), pairs.size(),
             config.epochs);
  harness::TrainHooks hooks;
  hooks.on_epoch = [](const harness::EpochMetrics& m) { fmt::print("{}\n", harness::format_metrics_line(m)); };
  const auto result = harness::train(config, pairs, c.out_dir, hooks);
  fmt::print("checkpoint: {}\n", result.checkpoint.string());
  return 0;
}

int run_eval(const Common& c, const std::string& checkpoint, const std::string& data, const std::string& split) {
  const auto params = model::load_checkpoint(checkpoint);
  const auto sets = synth::load_dataset(data);
  const auto& pairs = split == "seen" ? sets.seen : split == "unseen" ? sets.unseen : sets.train;
  const auto text = harness::format_report(harness::evaluate(params, pairs), split);
  write_text(fs::path(c.out_dir) / fmt::format("eval_{}.txt", split), text);
  fmt::print("{}", text);
  return 0;
}

int run_lir(const Common& c, const std::string& checkpoint, const std::string& targets_dir,
            const std::string& source) {
  const auto kv = load_kv(c);
  lir::LirConfig cfg;
  cfg.theta = kv.get_double("theta", cfg.theta);
  cfg.max_iters = kv.get_size("max_iters", cfg.max_iters);
  cfg.sample_seed = c.seed.value_or(kv.get_size("sample_seed", cfg.sample_seed));
  cfg.keep_improvements_only = kv.get_bool("keep_improvements_only", cfg.keep_improvements_only);
  reject_unused(kv);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(targets_dir)) {
    if (entry.path().extension() == ".obj") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<mesh::Mesh> targets;
  for (const auto& f : files) targets.push_back(mesh::load_obj(f));

  const auto result = lir::lir_normalize(targets, mesh::load_obj(source), model::load_checkpoint(checkpoint), cfg);
  const fs::path out(c.out_dir);
  for (std::size_t i = 0; i < result.meshes.size(); ++i) {
    fs::create_directories(out);
    mesh::save_obj(result.meshes[i], out / files[i].filename());
  }
  const auto text = lir::format_report(result.report);
  write_text(out / "lir_report.txt", text);
  fmt::print("{}", text);
  return 0;
}

int run_gradcheck(const Common& c, const std::string& flip) {
  harness::GradcheckOptions opt;
  if (c.seed) opt.seed = *c.seed;
  opt.flip_sign_of = flip;
  const auto report = harness::run_gradcheck(opt);
  const auto text = harness::format_report(report);
  write_text(fs::path(c.out_dir) / "gradcheck.txt", text);
  fmt::print("{}", text);
  return report.passed() ? 0 : 1;
}

// The attention buffers (V x V floats) exceed glibc's default mmap threshold,
// so each pass would map, fault in and unmap them again. Keep them on the heap.
void keep_large_buffers_on_heap() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometry-contrastive Transformer for mesh pose transfer"};
  app.require_subcommand(1);

  Common synth_c, train_c, transfer_c, eval_c, lir_c, grad_c;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic body dataset");
  add_common(synth, synth_c);

  std::string train_data;
  auto* train = app.add_subcommand("train", "Train a model on a dataset's training pairs");
  add_common(train, train_c);
  train->add_option("--data", train_data, "Dataset directory written by synth")->required();

  std::string tr_ckpt, tr_identity, tr_pose, tr_output;
  auto* transfer = app.add_subcommand("transfer", "Transfer a pose onto an identity mesh");
  add_common(transfer, transfer_c);
  transfer->add_option("--checkpoint", tr_ckpt, "Model checkpoint")->required()->check(CLI::ExistingFile);
  transfer->add_option("--identity", tr_identity, "Identity OBJ")->required()->check(CLI::ExistingFile);
  transfer->add_option("--pose", tr_pose, "Pose OBJ")->required()->check(CLI::ExistingFile);
  transfer->add_option("--output", tr_output, "Output OBJ (default: <out-dir>/transfer.obj)");

  std::string ev_ckpt, ev_data, ev_split = "seen";
  auto* eval = app.add_subcommand("eval", "Report PMD on a test split");
  add_common(eval, eval_c);
  eval->add_option("--checkpoint", ev_ckpt, "Model checkpoint")->required()->check(CLI::ExistingFile);
  eval->add_option("--data", ev_data, "Dataset directory")->required();
  eval->add_option("--split", ev_split, "seen | unseen | train")->check(CLI::IsMember({"seen", "unseen", "train"}));

  std::string lir_ckpt, lir_targets, lir_source;
  auto* lirc = app.add_subcommand("lir-normalize", "Latent isometric regularisation of a target mesh set");
  add_common(lirc, lir_c);
  lirc->add_option("--checkpoint", lir_ckpt, "Checkpoint of a model trained with architecture = lir")
      ->required()
      ->check(CLI::ExistingFile);
  lirc->add_option("--targets", lir_targets, "Directory of target OBJs")->required()->check(CLI::ExistingDirectory);
  lirc->add_option("--source", lir_source, "Source-regime OBJ")->required()->check(CLI::ExistingFile);

  std::string flip;
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  add_common(grad, grad_c);
  grad->add_option("--flip-sign-of", flip, "Negate the gradient of one case (mutation sanity)");

  CLI11_PARSE(app, argc, argv);
  keep_large_buffers_on_heap();

  try {
    if (*synth) return run_synth(synth_c);
    if (*train) return run_train(train_c, train_data);
    if (*transfer) {
      const auto out = tr_output.empty() ? (fs::path(transfer_c.out_dir) / "transfer.obj") : fs::path(tr_output);
      if (!out.parent_path().empty()) fs::create_directories(out.parent_path());
      harness::transfer(tr_ckpt, tr_identity, tr_pose, out);
      fmt::print("wrote {}\n", out.string());
      return 0;
    }
    if (*eval) return run_eval(eval_c, ev_ckpt, ev_data, ev_split);
    if (*lirc) return run_lir(lir_c, lir_ckpt, lir_targets, lir_source);
    if (*grad) return run_gradcheck(grad_c, flip);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 0;
}
