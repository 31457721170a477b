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

#include <cmath>
#include <cstdint>
#include <string>

#include "chunkasr/errors.hpp"
#include "chunkasr/numcore/tensor.hpp"

namespace chunkasr {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction. Moments are created lazily per parameter
/// name and always match the parameter's shape.
template <typename Scalar>
class Adam {
 public:
  explicit Adam(AdamOptions opts = {}) : opts_(opts) {}

  const AdamOptions& options() const { return opts_; }
  std::int64_t step_count() const { return step_; }

  /// Applies one update with learning rate `lr` (defaults to options().lr).
  /// A non-finite gradient rejects the whole step: nothing is modified and
  /// NumericalError names the offending parameter.
  void step(ParameterSet<Scalar>& params, const ParameterSet<Scalar>& grads, double lr = -1.0) {
    if (lr < 0) lr = opts_.lr;
    for (const auto& [name, g] : grads) {
      auto it = params.find(name);
      if (it == params.end()) throw ShapeError("adam: gradient for unknown parameter '" + name + "'");
      if (g.rows() != it->second.rows() || g.cols() != it->second.cols())
        throw ShapeError("adam: gradient shape mismatch for '" + name + "'");
      if (!g.allFinite()) throw NumericalError("adam: non-finite gradient for '" + name + "', step rejected");
    }
    ++step_;
    const double bc1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(step_));
    const Scalar b1 = static_cast<Scalar>(opts_.beta1), b2 = static_cast<Scalar>(opts_.beta2);
    const Scalar step_size = static_cast<Scalar>(lr / bc1);
    const Scalar inv_sqrt_bc2 = static_cast<Scalar>(1.0 / std::sqrt(bc2));
    const Scalar eps = static_cast<Scalar>(opts_.epsilon);
    for (const auto& [name, g] : grads) {
      Tensor<Scalar>& p = params.at(name);
      auto& m = moment(first_, name, p);
      auto& v = moment(second_, name, p);
      m = b1 * m + (Scalar(1) - b1) * g;
      v = b2 * v + (Scalar(1) - b2) * g.cwiseAbs2();
      p.array() -= step_size * m.array() / (v.array().sqrt() * inv_sqrt_bc2 + eps);
    }
  }

  const ParameterSet<Scalar>& first_moments() const { return first_; }
  const ParameterSet<Scalar>& second_moments() const { return second_; }

  /// Restores optimizer state (checkpoint resume).
  void restore(std::int64_t step, ParameterSet<Scalar> first, ParameterSet<Scalar> second) {
    step_ = step;
    first_ = std::move(first);
    second_ = std::move(second);
  }

 private:
  static Tensor<Scalar>& moment(ParameterSet<Scalar>& set, const std::string& name, const Tensor<Scalar>& like) {
    auto it = set.find(name);
    if (it == set.end()) it = set.emplace(name, Tensor<Scalar>::Zero(like.rows(), like.cols())).first;
    return it->second;
  }

  AdamOptions opts_;
  std::int64_t step_ = 0;
  ParameterSet<Scalar> first_;
  ParameterSet<Scalar> second_;
};

}  // namespace chunkasr
