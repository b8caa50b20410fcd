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

#include "gct/harness/train_config.hpp"

#include <fmt/format.h>

#include <cmath>

namespace gct::harness {
namespace {

std::string join(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + std::to_string(values[i]);
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigFileError("learning_rate must be > 0");
  if (!(lr_decay > 0.0)) throw ConfigFileError("lr_decay must be > 0");
  if (batch_size < 1) throw ConfigFileError("batch_size must be >= 1");
  for (std::size_t i = 1; i < lr_milestones.size(); ++i) {
    if (lr_milestones[i] <= lr_milestones[i - 1]) throw ConfigFileError("lr_milestones must be strictly increasing");
  }
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0 && adam.eps > 0.0)) {
    throw ConfigFileError("invalid Adam hyperparameters");
  }
  weights.validate();
  model.validate();
}

double TrainConfig::lr_at(std::size_t epoch) const {
  double lr = learning_rate;
  for (auto m : lr_milestones) {
    if (m < epoch) lr *= lr_decay;
  }
  return lr;
}

TrainConfig TrainConfig::from_kv(const KeyValueConfig& kv) {
  TrainConfig c;
  c.epochs = kv.get_size("epochs", c.epochs);
  c.learning_rate = kv.get_double("learning_rate", c.learning_rate);
  c.lr_milestones = kv.get_sizes("lr_milestones", c.lr_milestones);
  c.lr_decay = kv.get_double("lr_decay", c.lr_decay);
  c.batch_size = kv.get_size("batch_size", c.batch_size);
  c.weights.lambda_rec = kv.get_double("lambda_rec", c.weights.lambda_rec);
  c.weights.lambda_edge = kv.get_double("lambda_edge", c.weights.lambda_edge);
  c.weights.lambda_contra = kv.get_double("lambda_contra", c.weights.lambda_contra);
  c.seed = kv.get_size("seed", c.seed);
  c.checkpoint_interval = kv.get_size("checkpoint_interval", c.checkpoint_interval);
  c.pairs_per_epoch = kv.get_size("pairs_per_epoch", c.pairs_per_epoch);
  c.shuffle_vertices = kv.get_bool("shuffle_vertices", c.shuffle_vertices);
  c.adam.beta1 = kv.get_double("adam_beta1", c.adam.beta1);
  c.adam.beta2 = kv.get_double("adam_beta2", c.adam.beta2);
  c.adam.eps = kv.get_double("adam_eps", c.adam.eps);

  if (kv.has("architecture")) {
    const auto arch = model::parse_architecture(kv.get_string("architecture", ""));
    if (arch == model::Architecture::lir) c.model = model::ModelConfig::lir_default();
  }
  c.model.encoder_channels = kv.get_sizes("encoder_channels", c.model.encoder_channels);
  c.model.decoder_channels = kv.get_sizes("decoder_channels", c.model.decoder_channels);
  c.model.num_decoders = kv.get_size("num_decoders", c.model.decoder_channels.size());
  c.model.desk_scale_factor = kv.get_double("desk_scale_factor", c.model.desk_scale_factor);
  c.model.attention_enabled = kv.get_bool("attention_enabled", c.model.attention_enabled);

  if (auto unused = kv.unused_keys(); !unused.empty()) {
    throw ConfigFileError("unknown config key '" + unused.front() + "'");
  }
  c.validate();
  return c;
}

std::string TrainConfig::to_kv() const {
  std::string out;
  auto line = [&](const char* key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
  line("epochs", std::to_string(epochs));
  line("learning_rate", fmt::format("{}", learning_rate));
  line("lr_milestones", join(lr_milestones));
  line("lr_decay", fmt::format("{}", lr_decay));
  line("batch_size", std::to_string(batch_size));
  line("lambda_rec", fmt::format("{}", weights.lambda_rec));
  line("lambda_edge", fmt::format("{}", weights.lambda_edge));
  line("lambda_contra", fmt::format("{}", weights.lambda_contra));
  line("seed", std::to_string(seed));
  line("checkpoint_interval", std::to_string(checkpoint_interval));
  line("pairs_per_epoch", std::to_string(pairs_per_epoch));
  line("shuffle_vertices", shuffle_vertices ? "true" : "false");
  line("adam_beta1", fmt::format("{}", adam.beta1));
  line("adam_beta2", fmt::format("{}", adam.beta2));
  line("adam_eps", fmt::format("{}", adam.eps));
  line("architecture", model::to_string(model.architecture));
  line("encoder_channels", join(model.encoder_channels));
  line("decoder_channels", join(model.decoder_channels));
  line("num_decoders", std::to_string(model.num_decoders));
  line("desk_scale_factor", fmt::format("{}", model.desk_scale_factor));
  line("attention_enabled", model.attention_enabled ? "true" : "false");
  return out;
}

}  // namespace gct::harness
