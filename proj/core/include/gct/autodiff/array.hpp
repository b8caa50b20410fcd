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
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "gct/autodiff/errors.hpp"

namespace gct::ad {

using Shape = std::vector<std::size_t>;

inline std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

inline std::string to_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

/// Dense row-major array. A 2-D array is laid out channels x vertices.
template <typename T>
struct Array {
  Shape shape;
  std::vector<T> data;

  Array() = default;

  explicit Array(Shape s, T fill = T{0}) : shape(std::move(s)), data(element_count(shape), fill) {
    check_extents();
  }

  Array(Shape s, std::vector<T> values) : shape(std::move(s)), data(std::move(values)) {
    check_extents();
    if (data.size() != element_count(shape)) {
      throw DimensionError("array of shape " + to_string(shape) + " given " +
                           std::to_string(data.size()) + " values");
    }
  }

  std::size_t size() const { return data.size(); }
  std::size_t rows() const { return shape.empty() ? 1 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  T& operator()(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }

  template <typename U>
  Array<U> cast() const {
    Array<U> out;
    out.shape = shape;
    out.data.assign(data.begin(), data.end());
    return out;
  }

  friend bool operator==(const Array&, const Array&) = default;

 private:
  void check_extents() const {
    for (auto extent : shape) {
      if (extent == 0) throw DimensionError("zero extent in shape " + to_string(shape));
    }
  }
};

}  // namespace gct::ad
