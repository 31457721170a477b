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

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <map>
#include <string>

namespace chunkasr {

/// Dense row-major matrix. All continuous quantities (features, encodings,
/// logits, parameters) are stored as rank-2 tensors; vectors are 1 x n.
template <typename Scalar>
using Tensor = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Index = Eigen::Index;

template <typename Derived>
std::array<Index, 2> shape_of(const Eigen::MatrixBase<Derived>& m) {
  return {m.rows(), m.cols()};
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// Named parameter tensors. Ordered so that iteration (and therefore
/// serialization and optimizer updates) is deterministic.
template <typename Scalar>
using ParameterSet = std::map<std::string, Tensor<Scalar>>;

template <typename To, typename From>
ParameterSet<To> cast_parameters(const ParameterSet<From>& in) {
  ParameterSet<To> out;
  for (const auto& [name, t] : in) out.emplace(name, t.template cast<To>());
  return out;
}

}  // namespace chunkasr
