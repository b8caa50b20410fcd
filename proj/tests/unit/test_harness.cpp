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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "gct/harness/adam.hpp"
#include "gct/harness/evaluate.hpp"
#include "gct/harness/gradcheck.hpp"
#include "gct/harness/kv_config.hpp"
#include "gct/harness/train_config.hpp"
#include "gct/harness/trainer.hpp"
#include "gct/mesh/obj_io.hpp"
#include "gct/model/checkpoint.hpp"
#include "gct/synth/dataset.hpp"

namespace {

using namespace gct;
using namespace gct::harness;
namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("gct_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

synth::PairSets small_sets() {
  synth::SplitSpec s;
  s.n_identities = 2;
  s.n_poses = 2;
  s.held_out_identities = 1;
  s.held_out_poses = 1;
  s.test_pairs = 1;
  s.resolution = {3, 1};
  return synth::make_dataset(s, 1).materialize();
}

TrainConfig smoke_config() {
  TrainConfig c;
  c.epochs = 1;
  c.model.desk_scale_factor = 1.0 / 16.0;
  c.batch_size = 2;
  c.seed = 5;
  return c;
}

TEST(KeyValueConfigTest, ParsesCommentsListsAndTypes) {
  const auto kv = KeyValueConfig::parse("# comment\nepochs = 12\nname = abc # trailing\nflag = true\nlist = 1, 2,3\n\n");
  EXPECT_EQ(kv.get_size("epochs", 0), 12u);
  EXPECT_EQ(kv.get_string("name", ""), "abc");
  EXPECT_TRUE(kv.get_bool("flag", false));
  EXPECT_EQ(kv.get_sizes("list", {}), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(kv.get_double("missing", 2.5), 2.5);
  EXPECT_THROW(KeyValueConfig::parse("novalue\n"), ConfigFileError);
  EXPECT_THROW(KeyValueConfig::parse("x = abc\n").get_double("x", 0), ConfigFileError);
  EXPECT_THROW(KeyValueConfig::parse("x = -1\n").get_size("x", 0), ConfigFileError);
}

TEST(TrainConfigTest, DefaultValues) {
  const TrainConfig c;
  EXPECT_EQ(c.epochs, 1000u);
  EXPECT_EQ(c.learning_rate, 5e-5);
  EXPECT_EQ(c.lr_milestones, (std::vector<std::size_t>{200, 500}));
  EXPECT_EQ(c.lr_decay, 0.1);
  EXPECT_EQ(c.batch_size, 8u);
  EXPECT_EQ(c.weights.lambda_contra, 5e-4);
  EXPECT_EQ(TrainConfig::from_kv(KeyValueConfig{}).learning_rate, 5e-5);
}

TEST(TrainConfigTest, MilestoneSchedule) {
  TrainConfig c;
  c.learning_rate = 1.0;
  c.lr_milestones = {2, 4};
  c.lr_decay = 0.1;
  const double expected[] = {1.0, 1.0, 0.1, 0.1, 0.01};
  for (std::size_t e = 1; e <= 5; ++e) EXPECT_NEAR(c.lr_at(e), expected[e - 1], 1e-15) << e;
}

TEST(TrainConfigTest, ScheduleMatchesClosedFormForAnyMilestones) {
  TrainConfig c;
  c.learning_rate = 3e-4;
  c.lr_decay = 0.5;
  c.lr_milestones = {3, 7, 8, 20};
  for (std::size_t e = 1; e <= 25; ++e) {
    int passed = 0;
    for (auto m : c.lr_milestones) passed += m < e;
    EXPECT_DOUBLE_EQ(c.lr_at(e), 3e-4 * std::pow(0.5, passed));
  }
}

TEST(TrainConfigTest, ValidationAndRoundTrip) {
  TrainConfig c;
  c.lr_milestones = {5, 5};
  EXPECT_THROW(c.validate(), ConfigFileError);
  c = TrainConfig{};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigFileError);
  c = TrainConfig{};
  c.learning_rate = 0;
  EXPECT_THROW(c.validate(), ConfigFileError);
  EXPECT_THROW(TrainConfig::from_kv(KeyValueConfig::parse("typo_key = 1\n")), ConfigFileError);

  c = TrainConfig{};
  c.epochs = 7;
  c.lr_milestones = {2, 3};
  c.model.desk_scale_factor = 0.25;
  c.weights.lambda_contra = 0.0;
  EXPECT_EQ(TrainConfig::from_kv(KeyValueConfig::parse(c.to_kv())).to_kv(), c.to_kv());
  const auto lir = TrainConfig::from_kv(KeyValueConfig::parse("architecture = lir\n"));
  EXPECT_EQ(lir.model.architecture, model::Architecture::lir);
  EXPECT_EQ(lir.model.num_decoders, 3u);
}

TEST(AdamTest, ZeroGradientsLeaveParamsUnchanged) {
  model::ModelConfig mc;
  mc.desk_scale_factor = 1.0 / 16.0;
  auto params = model::init_params(mc, 1);
  const auto before = params;
  auto state = OptimizerState::for_params(params);
  adam_step(params, zero_gradients(params), state, 1e-3);
  EXPECT_EQ(params, before);
  EXPECT_EQ(state.step, 1u);
}

TEST(AdamTest, FirstStepMovesByLearningRate) {
  model::ModelParams<float> p;
  p.names = {"w"};
  p.tensors = {ad::Array<float>({1}, 0.0f)};
  auto state = OptimizerState::for_params(p);
  adam_step(p, Gradients{{1.0f}}, state, 0.1);
  const double expected = -0.1 * 1.0 / (1.0 + 1e-8);
  EXPECT_NEAR(p.tensors[0].data[0], expected, 1e-7);
}

TEST(AdamTest, MissingGradientsRejected) {
  model::ModelParams<float> p;
  p.names = {"w"};
  p.tensors = {ad::Array<float>({2}, 0.0f)};
  auto state = OptimizerState::for_params(p);
  EXPECT_THROW(adam_step(p, Gradients{}, state, 0.1), OptimizerError);
  EXPECT_THROW(adam_step(p, Gradients{{1.0f}}, state, 0.1), OptimizerError);
}

TEST(TrainerTest, SmokeRunWritesCheckpointAndLog) {
  const auto sets = small_sets();
  std::vector<mesh::PosePair> pairs(sets.train.begin(), sets.train.begin() + 4);
  const auto dir = fresh_dir("smoke");
  const auto result = train(smoke_config(), pairs, dir);
  ASSERT_EQ(result.log.size(), 1u);
  EXPECT_TRUE(std::isfinite(result.log[0].full));
  EXPECT_TRUE(fs::exists(dir / "model.gctf"));
  EXPECT_TRUE(fs::exists(dir / "model.gctf.manifest"));
  const auto log = slurp(dir / "metrics.tsv");
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 1);
  EXPECT_EQ(std::count(log.begin(), log.end(), '\t'), 5);
  EXPECT_EQ(model::load_checkpoint(dir / "model.gctf"), result.params);
}

TEST(TrainerTest, SeedReplayReproducesLogAndIntervalCheckpoints) {
  const auto sets = small_sets();
  auto c = smoke_config();
  c.epochs = 3;
  c.checkpoint_interval = 2;
  c.pairs_per_epoch = 3;
  const auto a = fresh_dir("replay_a");
  const auto b = fresh_dir("replay_b");
  train(c, sets.train, a);
  train(c, sets.train, b);
  EXPECT_EQ(slurp(a / "metrics.tsv"), slurp(b / "metrics.tsv"));
  EXPECT_EQ(slurp(a / "model.gctf"), slurp(b / "model.gctf"));
  EXPECT_TRUE(fs::exists(a / "epoch00002.gctf"));
  EXPECT_FALSE(fs::exists(a / "epoch00003.gctf"));
}

TEST(TrainerTest, RejectsInconsistentInputs) {
  EXPECT_THROW(train(smoke_config(), {}, {}), TrainError);
  const auto sets = small_sets();
  auto bad = sets.train[0];
  bad.pose = synth::generate_mesh(synth::IdentityParams::mean(), synth::PoseParams::rest(), {4, 1});
  EXPECT_ANY_THROW(train(smoke_config(), {bad}, {}));
}

TEST(EvaluateTest, GroundTruthAgainstItselfAndUnits) {
  const auto sets = small_sets();
  std::vector<mesh::Mesh> gts;
  for (const auto& p : sets.train) gts.push_back(p.ground_truth);
  EXPECT_EQ(pmd_report(gts, gts).mean, 0.0);
  EXPECT_THROW(pmd_report({}, {}), std::invalid_argument);

  PmdReport r;
  r.per_pair = {1e-4, 3e-4};
  r.mean = 2e-4;
  const auto text = format_report(r, "seen");
  EXPECT_NE(text.find("0\t0.0001\t1.000000"), std::string::npos) << text;
  EXPECT_NE(text.find("mean\t0.0002\t2.000000"), std::string::npos) << text;
}

TEST(EvaluateTest, MeanIsArithmeticMeanOfRows) {
  const auto sets = small_sets();
  auto c = smoke_config();
  const auto params = model::init_params(c.model, 3);
  const auto report = evaluate(params, sets.train);
  double total = 0;
  for (double v : report.per_pair) total += v;
  EXPECT_NEAR(report.mean, total / static_cast<double>(report.per_pair.size()), 1e-12);
}

TEST(TransferTest, WritesLoadableDeterministicOutput) {
  const auto sets = small_sets();
  const auto dir = fresh_dir("transfer");
  fs::create_directories(dir);
  model::save_checkpoint(model::init_params(smoke_config().model, 4), dir / "m.gctf");
  mesh::save_obj(sets.train[0].identity, dir / "id.obj");
  mesh::save_obj(sets.train[0].pose, dir / "pose.obj");
  transfer(dir / "m.gctf", dir / "id.obj", dir / "pose.obj", dir / "a.obj");
  transfer(dir / "m.gctf", dir / "id.obj", dir / "pose.obj", dir / "b.obj");
  const auto out = mesh::load_obj(dir / "a.obj");
  EXPECT_EQ(out.faces(), sets.train[0].identity.faces());
  EXPECT_EQ(slurp(dir / "a.obj"), slurp(dir / "b.obj"));

  mesh::save_obj(synth::generate_mesh(synth::IdentityParams::mean(), synth::PoseParams::rest(), {4, 1}),
                 dir / "other.obj");
  EXPECT_THROW(transfer(dir / "m.gctf", dir / "id.obj", dir / "other.obj", dir / "c.obj"), mesh::MeshError);
}

TEST(GradcheckTest, FreshBuildPassesEveryCase) {
  const auto report = run_gradcheck();
  for (const auto& c : report.cases) {
    EXPECT_TRUE(c.passed) << c.name << " rel err " << c.max_rel_error;
    EXPECT_LT(c.max_rel_error, 1e-4) << c.name;
  }
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.cases.size(), gradcheck_case_names().size());
}

TEST(GradcheckTest, SignFlipFailsOnlyTheMutatedCase) {
  for (const std::string target : {"softmax_over_keys", "cgc_loss", "gc_transformer:decoder1"}) {
    GradcheckOptions opt;
    opt.flip_sign_of = target;
    const auto report = run_gradcheck(opt);
    EXPECT_FALSE(report.passed());
    for (const auto& c : report.cases) EXPECT_EQ(c.passed, c.name != target) << target << " / " << c.name;
  }
}

TEST(GradcheckTest, ReportIsDeterministicPerSeed) {
  GradcheckOptions opt;
  opt.seed = 99;
  EXPECT_EQ(format_report(run_gradcheck(opt)), format_report(run_gradcheck(opt)));
}

}  // namespace
