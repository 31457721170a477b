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

#include "chunkasr/model/interleave.hpp"

namespace chunkasr {

/// Exact decoder attention work for one interleaved sequence, in attended
/// (query, key) pairs.
struct CostReport {
  std::int64_t frames = 0;
  std::int64_t tokens = 0;  // text tokens U
  std::int64_t chunk_frames = 0;
  std::int64_t context_chunks = 0;
  std::int64_t sequence_length = 0;  // N slots
  std::int64_t emitted = 0;          // U + K (text plus one EOS per chunk)
  std::int64_t total_pairs = 0;
  std::int64_t max_query_pairs = 0;
  /// total_pairs / emitted.
  double pairs_per_token = 0.0;
  /// Mean keys attended by the queries that emit tokens (last audio slot and
  /// text slots) of the final chunk: the cost of producing one more token.
  double marginal_pairs_per_token = 0.0;
};

/// Tokens per chunk when U tokens are spread evenly over K chunks.
std::vector<std::int64_t> spread_tokens(std::int64_t tokens, std::int64_t chunks);

/// Closed-form count from per-chunk audio lengths and token counts.
CostReport attention_cost(const std::vector<std::int64_t>& chunk_lengths, const std::vector<std::int64_t>& chunk_tokens,
                          std::int64_t context_chunks, bool attend_prev_eos = true);

/// T' frames in chunks of c with U tokens spread evenly.
CostReport attention_cost(std::int64_t frames, std::int64_t tokens, std::int64_t chunk_frames,
                          std::int64_t context_chunks, bool attend_prev_eos = true);

/// Reference count by enumerating mask_allowed over every pair.
std::int64_t attention_pairs_bruteforce(const InterleavedSequence& seq, std::int64_t context_chunks,
                                        bool attend_prev_eos = true);

}  // namespace chunkasr
