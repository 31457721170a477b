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

#include <cstdint>
#include <map>
#include <string>

#include "chunkasr/model/config.hpp"
#include "chunkasr/numcore/tape.hpp"

namespace chunkasr {

/// Model parameters plus the configuration that shaped them.
struct Model {
  ModelConfig config;
  ParameterSet<float> params;
};

/// Scaled-normal initialization (std = 1/sqrt(fan_in)); layer-norm gains 1,
/// biases 0. Deterministic in `seed`.
Model init_model(const ModelConfig& cfg, std::uint64_t seed);

std::size_t parameter_count(const ParameterSet<float>& params);

/// Binds named parameters to leaves of a tape on first use, so a forward
/// pass only pays for the parameters it touches.
template <typename Scalar>
class BoundParameters {
 public:
  BoundParameters(Tape<Scalar>& tape, const ParameterSet<Scalar>& params) : tape_(tape), params_(params) {}

  Var<Scalar> operator()(const std::string& name) {
    auto it = vars_.find(name);
    if (it != vars_.end()) return it->second;
    auto p = params_.find(name);
    if (p == params_.end()) throw ShapeError("unknown parameter '" + name + "'");
    Var<Scalar> v = tape_.recording() ? tape_.input(p->second) : tape_.constant(p->second);
    vars_.emplace(name, v);
    return v;
  }

  Tape<Scalar>& tape() { return tape_; }
  const std::map<std::string, Var<Scalar>>& bound() const { return vars_; }

  /// Gradients of all bound parameters after tape.backward().
  ParameterSet<Scalar> gradients() const {
    ParameterSet<Scalar> g;
    for (const auto& [name, v] : vars_) g.emplace(name, tape_.has_grad(v.id) ? tape_.grad(v.id) : zeros(v));
    return g;
  }

 private:
  static Tensor<Scalar> zeros(Var<Scalar> v) { return Tensor<Scalar>::Zero(v.rows(), v.cols()); }

  Tape<Scalar>& tape_;
  const ParameterSet<Scalar>& params_;
  std::map<std::string, Var<Scalar>> vars_;
};

}  // namespace chunkasr
