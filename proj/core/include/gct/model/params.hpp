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

#include <cstdint>
#include <string>
#include <vector>

#include "gct/autodiff/array.hpp"
#include "gct/model/config.hpp"

namespace gct::model {

/// Every learned tensor of a network, in declaration order.
template <typename T>
struct ModelParams {
  ModelConfig config;
  std::vector<std::string> names;
  std::vector<ad::Array<T>> tensors;

  std::size_t size() const { return tensors.size(); }
  std::size_t index_of(const std::string& name) const;
  ad::Array<T>& at(const std::string& name) { return tensors[index_of(name)]; }
  const ad::Array<T>& at(const std::string& name) const { return tensors[index_of(name)]; }
  std::size_t scalar_count() const;

  template <typename U>
  ModelParams<U> cast() const {
    ModelParams<U> out{config, names, {}};
    for (const auto& t : tensors) out.tensors.push_back(t.template cast<U>());
    return out;
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Linear weights ~ U(-a, a) with a = sqrt(1 / fan_in); biases and every
/// gamma start at zero. Deterministic in `seed`.
ModelParams<float> init_params(const ModelConfig& config, std::uint64_t seed);

template <typename T>
std::size_t ModelParams<T>::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw ConfigError("no parameter named '" + name + "'");
}

template <typename T>
std::size_t ModelParams<T>::scalar_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.size();
  return n;
}

}  // namespace gct::model
