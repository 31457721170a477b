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

// Transformer building blocks shared by the encoder and decoder.

#include <cmath>
#include <string>
#include <vector>

#include "chunkasr/model/params.hpp"
#include "chunkasr/numcore/ops.hpp"

namespace chunkasr {

/// Additive attention bias for disallowed (query, key) pairs. Large enough
/// that exp() underflows to exactly 0 in float and double.
inline constexpr double kMaskBias = -1e30;

/// Multi-head scaled dot-product attention over pre-projected, already
/// rotated q (n x D), k (m x D) and v (m x D). `bias` is n x m (0 or
/// kMaskBias). Returns the concatenated heads, n x D.
template <typename Scalar>
Var<Scalar> attend(Var<Scalar> q, Var<Scalar> k, Var<Scalar> v, int heads, const Tensor<Scalar>& bias) {
  const Index dim = q.cols();
  const Index hd = dim / heads;
  const Scalar inv = static_cast<Scalar>(1.0 / std::sqrt(static_cast<double>(hd)));
  std::vector<Var<Scalar>> outs;
  outs.reserve(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    auto qh = slice_cols(q, h * hd, hd);
    auto kh = slice_cols(k, h * hd, hd);
    auto vh = slice_cols(v, h * hd, hd);
    auto scores = add_constant(scale(matmul_nt(qh, kh), inv), bias);
    outs.push_back(matmul(softmax_rows(scores), vh));
  }
  return heads == 1 ? outs[0] : concat_cols<Scalar>(outs);
}

template <typename Scalar>
Var<Scalar> linear(BoundParameters<Scalar>& p, Var<Scalar> x, const std::string& name) {
  return add_row(matmul(x, p(name + ".w")), p(name + ".b"));
}

template <typename Scalar>
Var<Scalar> norm(BoundParameters<Scalar>& p, Var<Scalar> x, const std::string& name) {
  return layer_norm(x, p(name + ".g"), p(name + ".b"));
}

template <typename Scalar>
Var<Scalar> feed_forward(BoundParameters<Scalar>& p, Var<Scalar> x, const std::string& prefix) {
  return linear(p, gelu(linear(p, x, prefix + ".ffn1")), prefix + ".ffn2");
}

}  // namespace chunkasr
