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
#include <vector>

#include "chunkasr/data/features.hpp"
#include "chunkasr/data/vocab.hpp"
#include "chunkasr/numcore/tape.hpp"

namespace chunkasr {

/// Log-domain zero. Values at or below half of it are treated as -inf.
inline constexpr double kLogZero = -1e30;

double log_add(double a, double b);

/// True iff `frames` frames can emit `targets` (U plus one separating
/// blank per adjacent repeat).
bool ctc_feasible(std::int64_t frames, const TokenSeq& targets);

/// -log sum over all CTC paths that collapse to `targets`. `logprobs` is a
/// T' x C matrix of per-frame log-probabilities; `blank` is the blank
/// column. Targets are column indices different from `blank`.
/// Throws InfeasibleError when ctc_feasible() is false.
template <typename Scalar>
double ctc_logloss(const Tensor<Scalar>& logprobs, const TokenSeq& targets, int blank);

/// Gradient of ctc_logloss w.r.t. every logprobs entry:
/// -(posterior occupancy of that label at that frame).
template <typename Scalar>
Tensor<Scalar> ctc_logloss_grad(const Tensor<Scalar>& logprobs, const TokenSeq& targets, int blank);

/// Differentiable CTC loss node (1x1).
template <typename Scalar>
Var<Scalar> ctc_loss(Var<Scalar> logprobs, const TokenSeq& targets, int blank);

/// Test oracle: enumerates all C^T' label paths. Returns +inf when no path
/// collapses to the targets. Throws ShapeError when C^T' > 10^6.
double brute_force_ctc(const Tensor<double>& logprobs, const TokenSeq& targets, int blank);

/// Collapses a label path: merge repeats, then drop blanks.
TokenSeq ctc_collapse(const std::vector<int>& path, int blank);

}  // namespace chunkasr
