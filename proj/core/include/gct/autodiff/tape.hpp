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
#include <deque>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gct/autodiff/array.hpp"
#include "gct/autodiff/errors.hpp"

namespace gct::ad {

template <typename T>
class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
template <typename T>
class Var {
 public:
  Var() = default;
  Var(Tape<T>* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape<T>& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

  const Shape& shape() const { return tape_->shape(id_); }
  std::span<const T> value() const { return tape_->value(id_); }
  std::span<const T> grad() const { return tape_->grad(id_); }
  bool requires_grad() const { return tape_->requires_grad(id_); }

  std::size_t size() const { return value().size(); }
  std::size_t rows() const { return shape().empty() ? 1 : shape()[0]; }
  std::size_t cols() const { return shape().size() < 2 ? 1 : shape()[1]; }

  T item() const {
    if (size() != 1) throw ContractError("item() on tensor of shape " + to_string(shape()));
    return value()[0];
  }

  Array<T> to_array() const { return Array<T>(shape(), std::vector<T>(value().begin(), value().end())); }

 private:
  Tape<T>* tape_ = nullptr;
  std::size_t id_ = 0;
};

enum class TapeMode { recording, frozen };

/// Records operations in creation order and replays them backwards.
///
/// Nodes are appended only, so parents always precede children. Leaf
/// gradients accumulate across backward() calls until zero_grad(); gradients
/// of intermediate nodes are recomputed on every call. A frozen tape computes
/// the same values but keeps no backward closures.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  explicit Tape(TapeMode mode = TapeMode::recording) : mode_(mode) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  TapeMode mode() const { return mode_; }
  std::size_t size() const { return nodes_.size(); }

  Var<T> leaf(Array<T> value, bool requires_grad = true) {
    Node node;
    node.shape = std::move(value.shape);
    node.value = std::move(value.data);
    node.requires_grad = requires_grad && mode_ == TapeMode::recording;
    node.is_leaf = true;
    nodes_.push_back(std::move(node));
    return Var<T>(this, nodes_.size() - 1);
  }

  Var<T> constant(Array<T> value) { return leaf(std::move(value), false); }

  /// Appends the result of a differentiable operation. `backward` reads the
  /// node's gradient and accumulates into its parents via grad_buffer().
  Var<T> record(Shape shape, std::vector<T> values, std::initializer_list<Var<T>> parents,
                BackwardFn backward) {
    if (values.size() != element_count(shape)) {
      throw DimensionError("recorded value count does not match shape " + to_string(shape));
    }
    Node node;
    node.shape = std::move(shape);
    node.value = std::move(values);
    if (mode_ == TapeMode::recording) {
      for (const auto& p : parents) {
        if (&p.tape() != this) throw ContractError("operands live on different tapes");
        node.parents.push_back(p.id());
        node.requires_grad = node.requires_grad || requires_grad(p.id());
      }
      if (node.requires_grad) node.backward = std::move(backward);
    } else {
      for (const auto& p : parents) {
        if (&p.tape() != this) throw ContractError("operands live on different tapes");
      }
    }
    nodes_.push_back(std::move(node));
    return Var<T>(this, nodes_.size() - 1);
  }

  void backward(const Var<T>& loss) {
    if (mode_ != TapeMode::recording) throw ContractError("backward on a frozen tape");
    if (&loss.tape() != this) throw ContractError("loss belongs to another tape");
    if (loss.size() != 1) {
      throw ContractError("backward needs a scalar loss, got shape " + to_string(loss.shape()));
    }
    for (auto& node : nodes_) {
      if (!node.is_leaf) node.grad.clear();
    }
    if (!requires_grad(loss.id())) return;
    grad_buffer(loss.id())[0] += T{1};
    for (std::size_t id = loss.id() + 1; id-- > 0;) {
      Node& node = nodes_[id];
      if (node.backward && !node.grad.empty()) node.backward(*this, id);
    }
  }

  void zero_grad() {
    for (auto& node : nodes_) node.grad.clear();
  }

  const Shape& shape(std::size_t id) const { return nodes_.at(id).shape; }
  std::span<const T> value(std::size_t id) const { return nodes_.at(id).value; }
  std::span<const T> grad(std::size_t id) const { return nodes_.at(id).grad; }
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
  const std::vector<std::size_t>& parents(std::size_t id) const { return nodes_.at(id).parents; }

  /// Gradient slot of a node, zero-filled on first access.
  std::span<T> grad_buffer(std::size_t id) {
    Node& node = nodes_.at(id);
    if (node.grad.empty()) node.grad.assign(node.value.size(), T{0});
    return node.grad;
  }

 private:
  struct Node {
    Shape shape;
    std::vector<T> value;
    std::vector<T> grad;
    std::vector<std::size_t> parents;
    BackwardFn backward;
    bool requires_grad = false;
    bool is_leaf = false;
  };

  TapeMode mode_;
  std::deque<Node> nodes_;
};

}  // namespace gct::ad
