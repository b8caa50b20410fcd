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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <fmt/core.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#if defined(__GLIBC__)
#include <malloc.h>
#endif
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gct/autodiff/ops.hpp"
#include "gct/harness/evaluate.hpp"
#include "gct/harness/gradcheck.hpp"
#include "gct/harness/trainer.hpp"
#include "gct/lir/lir.hpp"
#include "gct/losses/losses.hpp"
#include "gct/mesh/normalize.hpp"
#include "gct/mesh/obj_io.hpp"
#include "gct/mesh/topology.hpp"
#include "gct/model/checkpoint.hpp"
#include "gct/model/network.hpp"
#include "gct/synth/dataset.hpp"

namespace {

namespace fs = std::filesystem;
using namespace gct;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Shared fixtures

constexpr std::uint64_t kDatasetSeed = 1;
constexpr std::uint64_t kTrainSeed = 0;
constexpr double kDeskScale = 1.0 / 16.0;

const synth::DatasetSplit& desk_split() {
  static const synth::DatasetSplit split = synth::make_dataset(synth::SplitSpec{}, kDatasetSeed);
  return split;
}

const synth::PairSets& desk_sets() {
  static const synth::PairSets sets = desk_split().materialize();
  return sets;
}

/// 200 epochs, milestones [50, 120], 64 shuffled pairs per epoch.
harness::TrainConfig desk_config(double lambda_contra) {
  harness::TrainConfig c;
  c.epochs = 200;
  c.learning_rate = 1e-3;
  c.lr_milestones = {50, 120};
  c.batch_size = 8;
  c.pairs_per_epoch = 64;
  c.seed = kTrainSeed;
  c.weights.lambda_contra = lambda_contra;
  c.model.desk_scale_factor = kDeskScale;
  return c;
}

struct DeskRun {
  double seen0 = 0, unseen0 = 0;  // untrained
  double seen = 0, unseen = 0;
  double seconds = 0;
  model::ModelParams<float> params;
};

DeskRun run_desk(double lambda_contra, const fs::path& out_dir) {
  const auto cfg = desk_config(lambda_contra);
  const auto& sets = desk_sets();
  const auto start = Clock::now();
  DeskRun run;
  const auto init = model::init_params(cfg.model, cfg.seed);
  run.seen0 = harness::evaluate(init, sets.seen).mean;
  run.unseen0 = harness::evaluate(init, sets.unseen).mean;
  auto result = harness::train(cfg, sets.train, out_dir);
  run.seen = harness::evaluate(result.params, sets.seen).mean;
  run.unseen = harness::evaluate(result.params, sets.unseen).mean;
  run.seconds = seconds_since(start);
  run.params = std::move(result.params);
  return run;
}

/// Attention-gate values away from zero so the attention branch matters.
model::ModelParams<float> open_gates(model::ModelParams<float> p, float value) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.names[i].ends_with(".gamma")) p.tensors[i].data[0] = value;
  }
  return p;
}

model::ModelConfig desk_model(model::Architecture arch) {
  auto c = arch == model::Architecture::lir ? model::ModelConfig::lir_default() : model::ModelConfig{};
  c.desk_scale_factor = kDeskScale;
  return c;
}

std::pair<mesh::Mesh, mesh::Mesh> normalized_inputs(const mesh::PosePair& pair) {
  const auto frame = mesh::unit_cube_frame(pair.identity);
  return {mesh::apply_frame(pair.identity, frame), mesh::apply_frame(pair.pose, frame)};
}

double max_coord_error(const mesh::Mesh& a, const mesh::Mesh& b) {
  double worst = 0.0;
  for (std::size_t v = 0; v < a.vertex_count(); ++v) {
    for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(a.vertices()[v][k] - b.vertices()[v][k]));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// 1. Gradient fidelity

Outcome check_gradients() {
  const auto start = Clock::now();
  const auto report = harness::run_gradcheck({});
  const double secs = seconds_since(start);
  double worst = 0.0;
  std::string failed;
  for (const auto& c : report.cases) {
    worst = std::max(worst, c.max_rel_error);
    if (!c.passed) failed += " " + c.name;
  }
  // The harness must notice a corrupted backward pass.
  harness::GradcheckOptions mutated;
  mutated.flip_sign_of = "cgc_loss";
  const bool caught = !harness::run_gradcheck(mutated).at("cgc_loss").passed;
  const bool pass = report.passed() && secs < 120.0 && caught;
  return {pass, fmt::format("{} cases, max rel err {:.3g}, {:.1f} s, sign flip {}{}", report.cases.size(), worst, secs,
                            caught ? "caught" : "MISSED", failed.empty() ? "" : "; failing:" + failed)};
}

// ---------------------------------------------------------------------------
// 2. CGC identity

/// Ring-edge form written with the law of cosines: the length of the
/// difference of the two edge vectors from their lengths and angle.
double cgc_law_of_cosines(const ad::Array<double>& pred, const ad::Array<double>& gt, const mesh::VertexRings& rings) {
  double total = 0.0;
  for (std::size_t p = 0; p < rings.size(); ++p) {
    for (auto q : rings[p]) {
      double e1[3], e2[3];
      for (int k = 0; k < 3; ++k) {
        e1[k] = pred(k, q) - pred(k, p);
        e2[k] = gt(k, q) - gt(k, p);
      }
      // c^2 = a^2 + b^2 - 2ab cos(t), with ab cos(t) taken as the dot product.
      const double a2 = e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2];
      const double b2 = e2[0] * e2[0] + e2[1] * e2[1] + e2[2] * e2[2];
      const double ab_cos = e1[0] * e2[0] + e1[1] * e2[1] + e1[2] * e2[2];
      total += std::sqrt(std::max(0.0, a2 + b2 - 2.0 * ab_cos));
    }
  }
  return total / static_cast<double>(rings.size());
}

double eval_cgc(const ad::Array<double>& pred, const ad::Array<double>& gt, const mesh::VertexRings& rings) {
  ad::Tape<double> tape(ad::TapeMode::frozen);
  return losses::cgc_loss(tape.constant(pred), tape.constant(gt), rings).item();
}

/// Triangle strip over 20 vertices with randomly relabelled vertices.
mesh::Mesh random_strip(std::mt19937_64& rng) {
  constexpr std::uint32_t n = 20;
  std::vector<mesh::Face> faces;
  for (std::uint32_t i = 0; i + 2 < n; ++i) faces.push_back({i, i + 1, i + 2});
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  std::shuffle(perm.begin(), perm.end(), rng);
  return mesh::permute_vertices(mesh::Mesh(std::vector<mesh::Vec3>(n), faces), perm);
}

ad::Array<double> random_coords(std::size_t v, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ad::Array<double> a({3, v});
  for (auto& x : a.data) x = dist(rng);
  return a;
}

ad::Array<double> translated(ad::Array<double> a, const mesh::Vec3& t) {
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t v = 0; v < a.cols(); ++v) a(k, v) += t[k];
  }
  return a;
}

Outcome check_cgc() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  double oracle_err = 0.0, zero_worst = 0.0, shift_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto rings = mesh::vertex_rings(random_strip(rng));
    const auto pred = random_coords(20, rng);
    const auto gt = random_coords(20, rng);
    const double vec = eval_cgc(pred, gt, rings);
    oracle_err = std::max(oracle_err, std::abs(vec - cgc_law_of_cosines(pred, gt, rings)));
    zero_worst = std::max({zero_worst, std::abs(eval_cgc(gt, gt, rings)), std::abs(cgc_law_of_cosines(gt, gt, rings))});
    const mesh::Vec3 t{shift(rng), shift(rng), shift(rng)};
    shift_err = std::max(shift_err, std::abs(eval_cgc(translated(pred, t), translated(gt, t), rings) - vec));
  }
  const bool pass = oracle_err <= 1e-9 && zero_worst == 0.0 && shift_err <= 1e-12;
  return {pass, fmt::format("100 pairs: |vector - cosines| <= {:.3g}, value at pred=gt {:.3g}, translation drift {:.3g}",
                            oracle_err, zero_worst, shift_err)};
}

// ---------------------------------------------------------------------------
// 3. Attention contract

Outcome check_attention() {
  const auto [identity, pose] = normalized_inputs(desk_sets().seen.front());
  double row_err = 0.0;
  std::size_t matrices = 0;
  bool closed_equal = true;
  for (auto arch : {model::Architecture::gc_transformer, model::Architecture::lir}) {
    const auto params = model::init_params(desk_model(arch), 11);
    const auto lively = open_gates(params, 0.5f);
    ad::Tape<float> tape(ad::TapeMode::frozen);
    const auto bound = model::bind(tape, lively, false);
    const auto out = model::forward(bound, tape.constant(mesh::to_array<float>(identity)),
                                    tape.constant(mesh::to_array<float>(pose)));
    for (const auto& a : out.attention) {
      ++matrices;
      const auto w = a.value();
      for (std::size_t r = 0; r < a.rows(); ++r) {
        double total = 0.0;
        for (std::size_t c = 0; c < a.cols(); ++c) total += w[r * a.cols() + c];
        row_err = std::max(row_err, std::abs(total - 1.0));
      }
    }
    // Freshly initialised gates are zero.
    auto excised = params;
    excised.config.attention_enabled = false;
    closed_equal = closed_equal && model::run_forward(params, identity, pose) == model::run_forward(excised, identity, pose);
  }
  const bool pass = row_err <= 1e-6 && closed_equal && matrices > 0;
  return {pass, fmt::format("{} matrices, max |row sum - 1| {:.3g}; closed gates vs excised: {}", matrices, row_err,
                            closed_equal ? "bit-identical" : "DIFFERENT")};
}

// ---------------------------------------------------------------------------
// 4. Permutation equivariance

Outcome check_equivariance() {
  const auto [identity, pose] = normalized_inputs(desk_sets().seen.front());
  const auto params = open_gates(model::init_params(desk_model(model::Architecture::gc_transformer), 12), 0.5f);
  const auto base = model::run_forward(params, identity, pose);
  std::mt19937_64 rng(13);
  std::vector<std::uint32_t> perm(identity.vertex_count());
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto out =
        model::run_forward(params, mesh::permute_vertices(identity, perm), mesh::permute_vertices(pose, perm));
    worst = std::max(worst, max_coord_error(out, mesh::permute_vertices(base, perm)));
  }
  return {worst <= 1e-5,
          fmt::format("20 permutations, V={}, max coordinate error {:.3g}", identity.vertex_count(), worst)};
}

// ---------------------------------------------------------------------------
// 5-6. Desk-scale learning and the CGC ablation

Outcome check_learning(const DeskRun& run) {
  const double seen_ratio = run.seen / run.seen0, unseen_ratio = run.unseen / run.unseen0;
  const bool pass = seen_ratio <= 0.2 && unseen_ratio <= 0.5 && run.seconds < 1800.0;
  return {pass, fmt::format("seen PMD {:.4g} -> {:.4g} (x{:.3f}), unseen {:.4g} -> {:.4g} (x{:.3f}), {:.0f} s",
                            run.seen0, run.seen, seen_ratio, run.unseen0, run.unseen, unseen_ratio, run.seconds)};
}

Outcome check_ablation(const DeskRun& with_cgc, const DeskRun& without) {
  const bool pass = with_cgc.seen <= 1.05 * without.seen;
  return {pass, fmt::format("seen PMD lambda_contra=5e-4: {:.4g}, lambda_contra=0: {:.4g} (ratio {:.3f}), {:.0f} s",
                            with_cgc.seen, without.seen, with_cgc.seen / without.seen, without.seconds)};
}

// ---------------------------------------------------------------------------
// 7. LIR on the cross-regime split

Outcome check_lir(const fs::path& work) {
  const auto start = Clock::now();
  // The regularisation network learns the source (wide-swing) regime only.
  auto cfg = desk_config(5e-4);
  cfg.model = desk_model(model::Architecture::lir);
  cfg.epochs = 100;
  cfg.lr_milestones = {50};
  const auto params = harness::train(cfg, desk_sets().train, work / "lir_model").params;

  synth::SplitSpec spont;
  spont.regime = synth::PoseRegime::spontaneous;
  const auto target_split = synth::make_dataset(spont, kDatasetSeed + 1);
  std::vector<mesh::Mesh> targets;
  for (std::size_t i = 0; i < 16; ++i) targets.push_back(target_split.mesh(i % spont.n_identities, i));
  const auto source = desk_split().mesh(0, 0);

  lir::LirConfig lc;
  const auto result = lir::lir_normalize(targets, source, params, lc);
  bool bookkeeping = result.meshes.size() == targets.size() && result.report.meshes.size() == targets.size();
  std::size_t converged = 0;
  for (const auto& m : result.report.meshes) {
    bookkeeping = bookkeeping && m.iterations <= lc.max_iters && m.converged == (m.final_gap < lc.theta);
    converged += m.converged;
  }
  const double before = result.report.mean_initial_gap(), after = result.report.mean_final_gap();
  // Shown for comparison only: every pass replaces the mesh.
  auto literal = lc;
  literal.keep_improvements_only = false;
  const double literal_after = lir::lir_normalize(targets, source, params, literal).report.mean_final_gap();
  const bool pass = bookkeeping && after < before;
  return {pass, fmt::format("{} targets, {} converged (theta {}), mean code gap {:.4g} -> {:.4g} "
                            "(replace-always: {:.4g}), bookkeeping {}, {:.0f} s",
                            targets.size(), converged, lc.theta, before, after, literal_after,
                            bookkeeping ? "consistent" : "BROKEN", seconds_since(start))};
}

// ---------------------------------------------------------------------------
// 8. Determinism and persistence

Outcome check_persistence(const fs::path& work, const model::ModelParams<float>& trained) {
  // Seed replay of a short run.
  auto cfg = desk_config(5e-4);
  cfg.epochs = 3;
  cfg.pairs_per_epoch = 16;
  const std::vector<mesh::PosePair> few(desk_sets().train.begin(), desk_sets().train.begin() + 32);
  harness::train(cfg, few, work / "replay_a");
  harness::train(cfg, few, work / "replay_b");
  const auto log_a = slurp(work / "replay_a" / "metrics.tsv");
  const bool replay = !log_a.empty() && log_a == slurp(work / "replay_b" / "metrics.tsv");

  const auto ckpt = work / "roundtrip.gctf";
  model::save_checkpoint(trained, ckpt);
  const auto loaded = model::load_checkpoint(ckpt);
  const auto [identity, pose] = normalized_inputs(desk_sets().unseen.front());
  const bool forward_equal = loaded == trained && model::run_forward(loaded, identity, pose) ==
                                                      model::run_forward(trained, identity, pose);

  // Synthetic mesh plus awkward doubles.
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto verts = desk_sets().train.front().ground_truth.vertices();
  for (auto& v : verts) {
    for (auto& x : v) x = dist(rng) * std::pow(10.0, std::round(dist(rng) * 30.0));
  }
  verts[0] = {1.0 / 3.0, -0.0, 5e-324};
  bool obj_equal = true;
  for (const auto& m : {desk_sets().train.front().ground_truth, desk_sets().train.front().ground_truth.with_vertices(verts)}) {
    const auto path = work / "roundtrip.obj";
    mesh::save_obj(m, path);
    obj_equal = obj_equal && mesh::load_obj(path) == m;
  }
  const bool pass = replay && forward_equal && obj_equal;
  return {pass, fmt::format("metrics replay {}, checkpoint forward {}, OBJ round trip {}",
                            replay ? "byte-equal" : "DIFFERS", forward_equal ? "bitwise" : "DIFFERS",
                            obj_equal ? "exact" : "DIFFERS")};
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
  CLI::App app{"Acceptance checks"};
  std::string work_dir = (fs::temp_directory_path() / "gct_acceptance").string();
  std::vector<int> only;
  app.add_option("--work-dir", work_dir, "Scratch directory for checkpoints and logs");
  app.add_option("--only", only, "Run just these criteria (1-8)")->check(CLI::Range(1, 8));
  std::vector<int> shortfalls;
  app.add_option("--known-shortfall", shortfalls,
                 "Criteria whose FAIL is documented and does not set the exit code")
      ->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);
  keep_large_buffers_on_heap();

  const fs::path work(work_dir);
  fs::remove_all(work);
  fs::create_directories(work);
  const std::set<int> wanted(only.begin(), only.end());
  const auto enabled = [&](int id) { return wanted.empty() || wanted.count(id) != 0; };
  const std::set<int> known(shortfalls.begin(), shortfalls.end());

  int failures = 0;
  const auto report = [&](int id, const char* title, const std::function<Outcome()>& fn) {
    if (!enabled(id)) return;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const bool excused = !o.pass && known.count(id) != 0;
    failures += !o.pass && !excused;
    fmt::print("{} {} {}: {}{}\n", o.pass ? "PASS" : "FAIL", id, title, o.detail,
               excused ? " [known shortfall]" : "");
    std::fflush(stdout);
  };

  report(1, "gradient fidelity", check_gradients);
  report(2, "CGC identity", check_cgc);
  report(3, "attention contract", check_attention);
  report(4, "permutation equivariance", check_equivariance);

  std::optional<DeskRun> with_cgc, without_cgc;
  const auto desk_with = [&]() -> const DeskRun& {
    if (!with_cgc) with_cgc = run_desk(5e-4, work / "desk_cgc");
    return *with_cgc;
  };
  report(5, "desk-scale learning", [&] { return check_learning(desk_with()); });
  report(6, "CGC ablation direction", [&] {
    without_cgc = run_desk(0.0, work / "desk_no_cgc");
    return check_ablation(desk_with(), *without_cgc);
  });
  report(7, "LIR behaviour", [&] { return check_lir(work); });
  report(8, "determinism and persistence", [&] {
    const auto params = with_cgc ? with_cgc->params
                                 : model::init_params(desk_model(model::Architecture::gc_transformer), kTrainSeed);
    return check_persistence(work, params);
  });

  return failures == 0 ? 0 : 1;
}
