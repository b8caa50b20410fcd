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

#include "gct/model/config.hpp"

#include <algorithm>
#include <cmath>

namespace gct::model {

std::string to_string(Architecture arch) {
  return arch == Architecture::lir ? "lir" : "gc_transformer";
}

Architecture parse_architecture(const std::string& text) {
  if (text == "gc_transformer") return Architecture::gc_transformer;
  if (text == "lir") return Architecture::lir;
  throw ConfigError("unknown architecture '" + text + "'");
}

ModelConfig ModelConfig::lir_default() {
  ModelConfig cfg;
  cfg.architecture = Architecture::lir;
  cfg.decoder_channels = {1024, 512, 256};
  cfg.num_decoders = 3;
  return cfg;
}

std::size_t ModelConfig::scaled(std::size_t width) const {
  const auto w = static_cast<long long>(std::llround(static_cast<double>(width) * desk_scale_factor));
  return static_cast<std::size_t>(std::max(1LL, w));
}

std::vector<std::size_t> ModelConfig::encoder_widths() const {
  std::vector<std::size_t> out = encoder_channels;
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = scaled(out[i]);
  return out;
}

std::vector<std::size_t> ModelConfig::decoder_widths() const {
  std::vector<std::size_t> out = decoder_channels;
  for (auto& w : out) w = scaled(w);
  return out;
}

void ModelConfig::validate() const {
  if (!(desk_scale_factor > 0.0) || !std::isfinite(desk_scale_factor)) {
    throw ConfigError("desk_scale_factor must be positive");
  }
  if (encoder_channels.size() < 2 || encoder_channels.front() != 3) {
    throw ConfigError("encoder_channels must start at 3 and contain at least one layer");
  }
  if (num_decoders == 0 || decoder_channels.size() != num_decoders) {
    throw ConfigError("decoder_channels must list exactly num_decoders widths");
  }
  for (auto w : encoder_channels) {
    if (w == 0) throw ConfigError("zero channel width");
  }
  for (auto w : decoder_channels) {
    if (w == 0) throw ConfigError("zero channel width");
  }
  if (architecture == Architecture::lir && scaled(decoder_channels.front()) != latent_channels()) {
    throw ConfigError("lir architecture feeds the encoder output straight into decoder 1; widths must agree");
  }
}

}  // namespace gct::model
