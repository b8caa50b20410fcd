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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gct::model {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Architecture {
  /// Two encoders, identity/pose paths reduced in parallel between decoders.
  gc_transformer,
  /// One shared encoder and a single path through the decoders; used by the
  /// latent isometric regularisation pass.
  lir,
};

std::string to_string(Architecture arch);
Architecture parse_architecture(const std::string& text);

struct ModelConfig {
  Architecture architecture = Architecture::gc_transformer;
  std::vector<std::size_t> encoder_channels{3, 64, 128, 1024};
  std::vector<std::size_t> decoder_channels{1024, 512, 512, 256};
  std::size_t num_decoders = 4;
  /// Multiplies every hidden width; input and output stay at 3 channels.
  double desk_scale_factor = 1.0;
  /// When false the attention branch of every decoder is removed.
  bool attention_enabled = true;

  /// Three-decoder layout of the regularisation network.
  static ModelConfig lir_default();

  std::size_t scaled(std::size_t width) const;
  std::vector<std::size_t> encoder_widths() const;
  std::vector<std::size_t> decoder_widths() const;
  std::size_t latent_channels() const { return encoder_widths().back(); }

  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

}  // namespace gct::model
