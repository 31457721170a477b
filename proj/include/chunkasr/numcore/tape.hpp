// Copyright 2026 The chunkasr Authors
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

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chunkasr/errors.hpp"
#include "chunkasr/numcore/tensor.hpp"

namespace chunkasr {

template <typename Scalar>
class Tape;

/// Handle to a node on a Tape. Cheap to copy; only valid while the tape
/// that produced it is alive.
template <typename Scalar>
struct Var {
  Tape<Scalar>* tape = nullptr;
  int id = -1;

  const Tensor<Scalar>& value() const { return tape->value(id); }
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }
  bool valid() const { return tape != nullptr && id >= 0; }
};

/// Define-by-run record of primitive operations.
///
/// Every primitive computes its value eagerly when pushed and keeps its
/// forward rule, so the whole tape can be replayed after leaf values change
/// (used by evaluate() and finite-difference checks). Nodes are stored in
/// creation order, which is a valid topological order. With recording
/// disabled the tape only keeps values, which is what inference uses.
template <typename Scalar>
class Tape {
 public:
  using Mat = Tensor<Scalar>;
  using Rule = std::function<void(Tape&, int)>;

  explicit Tape(bool record = true) : record_(record) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return record_; }
  std::size_t size() const { return nodes_.size(); }

  /// Differentiable leaf.
  Var<Scalar> input(Mat value) { return leaf(std::move(value), record_); }
  /// Non-differentiable leaf.
  Var<Scalar> constant(Mat value) { return leaf(std::move(value), false); }

  /// Appends a primitive. `forward` must assign value(self); `backward`
  /// must accumulate into grad(input) for each input that needs_grad().
  Var<Scalar> push(const char* op, std::vector<int> inputs, Rule forward, Rule backward) {
    Node n;
    n.op = op;
    n.inputs = std::move(inputs);
    for (int in : n.inputs) n.requires_grad = n.requires_grad || nodes_[in].requires_grad;
    nodes_.push_back(std::move(n));
    const int self = static_cast<int>(nodes_.size()) - 1;
    forward(*this, self);
    if (record_) {
      nodes_[self].forward = std::move(forward);
      if (nodes_[self].requires_grad) nodes_[self].backward = std::move(backward);
    }
    return {this, self};
  }

  const Mat& value(int id) const { return nodes_[id].value; }
  Mat& mutable_value(int id) { return nodes_[id].value; }
  const char* op(int id) const { return nodes_[id].op; }
  const std::vector<int>& inputs(int id) const { return nodes_[id].inputs; }
  bool needs_grad(int id) const { return nodes_[id].requires_grad; }
  bool is_leaf(int id) const { return nodes_[id].leaf; }

  /// Gradient accumulator of a node, zero-initialized on first access.
  Mat& grad(int id) {
    Node& n = nodes_[id];
    if (n.grad.size() == 0 && n.value.size() != 0) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
    if (n.grad.rows() != n.value.rows() || n.grad.cols() != n.value.cols())
      n.grad = Mat::Zero(n.value.rows(), n.value.cols());
    return n.grad;
  }
  bool has_grad(int id) const { return nodes_[id].grad.size() != 0; }

  /// Replaces a leaf's value. The shape must match.
  void set_value(Var<Scalar> leaf_var, const Mat& v) {
    Node& n = nodes_[leaf_var.id];
    if (!n.leaf) throw ShapeError("set_value: node is not a leaf");
    if (n.value.rows() != v.rows() || n.value.cols() != v.cols())
      throw ShapeError("set_value: shape mismatch on leaf " + std::to_string(leaf_var.id));
    n.value = v;
  }

  /// Recomputes every non-leaf node in order.
  void replay() {
    if (!record_) throw StateError("replay: tape was built without recording");
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i)
      if (!nodes_[i].leaf) nodes_[i].forward(*this, i);
  }

  /// Reverse sweep from a scalar output. Gradients accumulate across calls.
  void backward(Var<Scalar> out, Scalar seed = Scalar(1)) {
    if (!record_) throw StateError("backward: tape was built without recording");
    const Mat& v = value(out.id);
    if (v.rows() != 1 || v.cols() != 1)
      throw ShapeError("backward: output of '" + std::string(op(out.id)) + "' is " +
                       std::to_string(v.rows()) + "x" + std::to_string(v.cols()) + ", not scalar");
    grad(out.id)(0, 0) += seed;
    for (int i = out.id; i >= 0; --i) {
      Node& n = nodes_[i];
      if (n.leaf || !n.requires_grad || n.grad.size() == 0 || !n.backward) continue;
      n.backward(*this, i);
    }
  }

  void zero_grad() {
    for (auto& n : nodes_) n.grad.resize(0, 0);
  }

 private:
  struct Node {
    const char* op = "leaf";
    std::vector<int> inputs;
    Mat value;
    Mat grad;
    Rule forward;
    Rule backward;
    bool leaf = false;
    bool requires_grad = false;
  };

  Var<Scalar> leaf(Mat value, bool requires_grad) {
    Node n;
    n.value = std::move(value);
    n.leaf = true;
    n.requires_grad = requires_grad;
    nodes_.push_back(std::move(n));
    return {this, static_cast<int>(nodes_.size()) - 1};
  }

  bool record_;
  std::vector<Node> nodes_;
};

/// Sets the given leaves, replays the tape and returns copies of the
/// requested outputs.
template <typename Scalar>
std::vector<Tensor<Scalar>> evaluate(Tape<Scalar>& tape, std::span<const Var<Scalar>> leaves,
                                     std::span<const Tensor<Scalar>> values,
                                     std::span<const Var<Scalar>> outputs) {
  if (leaves.size() != values.size()) throw ShapeError("evaluate: leaves/values count mismatch");
  for (std::size_t i = 0; i < leaves.size(); ++i) tape.set_value(leaves[i], values[i]);
  tape.replay();
  std::vector<Tensor<Scalar>> out;
  out.reserve(outputs.size());
  for (const auto& o : outputs) out.push_back(o.value());
  return out;
}

}  // namespace chunkasr
