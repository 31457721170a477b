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

namespace chunkasr {

struct AlignmentResult {
  std::vector<int> path;                 // per-frame label column (targets or blank)
  std::vector<int> states;               // per-frame state in the 2U+1 expanded lattice
  std::vector<std::int64_t> end_frames;  // last frame emitting each target token
  double log_prob = 0.0;                 // best path log-probability
};

/// Viterbi forced alignment through the CTC expanded-state lattice.
///
/// Exact score ties are resolved by predecessor priority during the
/// backtrace: at the last frame the final label state beats the final
/// blank; into a blank state, leaving the label beats staying in blank;
/// into a label state, coming straight from the previous label beats coming
/// from the blank in between, which beats staying on the label. Net effect:
/// blanks are held before emissions rather than after them, so every token
/// ends as late as the scores allow.
///
/// Throws InfeasibleError when the targets cannot fit in T' frames.
AlignmentResult ctc_forced_align(const Tensor<float>& logprobs, const TokenSeq& targets, int blank);
AlignmentResult ctc_forced_align(const Tensor<double>& logprobs, const TokenSeq& targets, int blank);

/// Predecessor rank used by the tie rule (lower wins). `from` and `to` are
/// expanded-lattice states at consecutive frames.
int transition_rank(int from, int to);

}  // namespace chunkasr
