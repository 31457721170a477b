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

#include <algorithm>
#include <cmath>
#include <span>

#include "chunkasr/numcore/tape.hpp"

namespace chunkasr {

struct GradCheckResult {
  double max_rel_error = 0.0;
  int worst_input = -1;     // index into the `inputs` span
  Index worst_element = -1;  // row-major element index
  double analytic = 0.0;
  double numeric = 0.0;
};

/// Compares tape.backward() against central differences, element by
/// element, for each of `inputs` (which must be leaves). Relative error is
/// |a - n| / max(1, |a|, |n|). Leaf values are restored afterwards.
template <typename Scalar>
GradCheckResult finite_diff_check(Tape<Scalar>& tape, Var<Scalar> output, std::span<const Var<Scalar>> inputs,
                                  double h) {
  if (!(h > 0)) throw ShapeError("finite_diff_check: step must be positive");
  tape.replay();
  tape.zero_grad();
  tape.backward(output);
  std::vector<Tensor<Scalar>> analytic;
  for (const auto& in : inputs) analytic.push_back(tape.grad(in.id));

  GradCheckResult res;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Tensor<Scalar> base = inputs[k].value();
    Tensor<Scalar> probe = base;
    for (Index e = 0; e < base.size(); ++e) {
      const Scalar orig = base.data()[e];
      probe.data()[e] = orig + static_cast<Scalar>(h);
      tape.set_value(inputs[k], probe);
      tape.replay();
      const double up = static_cast<double>(output.value()(0, 0));
      probe.data()[e] = orig - static_cast<Scalar>(h);
      tape.set_value(inputs[k], probe);
      tape.replay();
      const double down = static_cast<double>(output.value()(0, 0));
      probe.data()[e] = orig;
      const double numeric = (up - down) / (2.0 * h);
      const double a = static_cast<double>(analytic[k].data()[e]);
      const double err = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
      if (err > res.max_rel_error || res.worst_input < 0) {
        res = {err, static_cast<int>(k), e, a, numeric};
      }
    }
    tape.set_value(inputs[k], base);
  }
  tape.replay();
  return res;
}

}  // namespace chunkasr
