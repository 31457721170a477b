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

#include "chunkasr/data/vocab.hpp"

namespace chunkasr {

/// Edit counts of one or more aligned utterance pairs.
struct WerReport {
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;
  std::int64_t ref_length = 0;
  std::int64_t utterances = 0;

  std::int64_t errors() const { return substitutions + deletions + insertions; }
  /// (S + D + I) / N as a fraction; an empty reference counts as N = 1.
  double wer() const;
  double deletion_rate() const;
  WerReport& operator+=(const WerReport& o);
  bool operator==(const WerReport&) const = default;
};

/// Minimal edit alignment. Among minimal alignments the one with the most
/// substitutions is chosen, which fixes S, D and I uniquely and makes the
/// counts symmetric under swapping ref and hyp (with D and I exchanged).
WerReport wer(const TokenSeq& ref, const TokenSeq& hyp);

struct CorpusWer {
  WerReport all;
  WerReport top_decile;  // the longest 10% of references (at least one)
};

CorpusWer corpus_wer(const std::vector<TokenSeq>& refs, const std::vector<TokenSeq>& hyps);

}  // namespace chunkasr
