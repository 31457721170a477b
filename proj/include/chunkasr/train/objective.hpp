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

#include "chunkasr/ctcalign/segment.hpp"
#include "chunkasr/model/interleave.hpp"
#include "chunkasr/model/params.hpp"

namespace chunkasr {

/// Next-token targets per slot: targets[i] is the token at slot i+1 when
/// that slot is text or EOS, else -1 (uncounted).
struct SlotTargets {
  std::vector<int> targets;
  std::size_t counted = 0;
};

SlotTargets build_targets(const InterleavedSequence& seq);

struct LossBreakdown {
  double ce = 0.0;     // mean NLL over counted slots (EOS included)
  double ctc = 0.0;    // CTC NLL summed over feasible elements, per transcript token
  double total = 0.0;  // ce + w * ctc (ctc alone for encoder-only batches)
  std::size_t counted_slots = 0;
  std::size_t ctc_tokens = 0;
  std::vector<std::size_t> infeasible;  // batch elements excluded from the CTC term
};

/// One training example over stacked frames.
template <typename Scalar>
struct TrainItem {
  const Tensor<Scalar>* frames = nullptr;
  const TokenSeq* transcript = nullptr;
  const SegmentedTranscript* segmentation = nullptr;  // unused for encoder-only batches
};

template <typename Scalar>
struct LossGraph {
  Var<Scalar> total;
  LossBreakdown breakdown;
};

/// Joint objective over a batch: cross-entropy over all counted slots of all
/// elements, plus `ctc_weight` times the CTC loss. With `decoder` false the
/// objective is the CTC term alone (encoder pretraining). Throws
/// InfeasibleError when no element contributes anything.
template <typename Scalar>
LossGraph<Scalar> total_loss(BoundParameters<Scalar>& params, const ModelConfig& cfg,
                             const std::vector<TrainItem<Scalar>>& batch, double ctc_weight, bool decoder = true);

}  // namespace chunkasr
