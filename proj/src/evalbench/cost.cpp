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

#include "chunkasr/evalbench/cost.hpp"

#include <algorithm>

#include "chunkasr/errors.hpp"

namespace chunkasr {

std::vector<std::int64_t> spread_tokens(std::int64_t tokens, std::int64_t chunks) {
  if (chunks < 1 || tokens < 0) throw ShapeError("spread_tokens: need chunks >= 1 and tokens >= 0");
  std::vector<std::int64_t> out(static_cast<std::size_t>(chunks));
  for (std::int64_t k = 0; k < chunks; ++k) out[static_cast<std::size_t>(k)] = (k + 1) * tokens / chunks - k * tokens / chunks;
  return out;
}

CostReport attention_cost(const std::vector<std::int64_t>& lengths, const std::vector<std::int64_t>& tokens,
                          std::int64_t b, bool attend_prev_eos) {
  if (lengths.empty() || lengths.size() != tokens.size())
    throw ShapeError("attention_cost: need one token count per chunk");
  const std::size_t K = lengths.size();
  CostReport r;
  r.context_chunks = b;
  r.chunk_frames = lengths.front();
  std::vector<std::int64_t> n(K);
  for (std::size_t k = 0; k < K; ++k) {
    if (lengths[k] < 1 || tokens[k] < 0) throw ShapeError("attention_cost: invalid chunk");
    n[k] = lengths[k] + tokens[k] + 1;
    r.frames += lengths[k];
    r.tokens += tokens[k];
    r.sequence_length += n[k];
  }
  r.emitted = r.tokens + static_cast<std::int64_t>(K);
  for (std::size_t k = 0; k < K; ++k) {
    // Keys from earlier chunks in the window; every query of chunk k sees them.
    std::int64_t window = 0;
    const std::size_t first = b >= static_cast<std::int64_t>(k) ? 0 : k - static_cast<std::size_t>(b);
    for (std::size_t j = first; j < k; ++j) window += attend_prev_eos ? n[j] : n[j] - 1;
    // Query i (0-based) within the chunk also sees i + 1 keys of its own chunk.
    r.total_pairs += n[k] * window + n[k] * (n[k] + 1) / 2;
    r.max_query_pairs = std::max(r.max_query_pairs, window + n[k]);
    if (k + 1 == K) {
      const std::int64_t a = lengths[k], u = tokens[k];
      r.marginal_pairs_per_token = static_cast<double>(window) + static_cast<double>(2 * a + u) / 2.0;
    }
  }
  r.pairs_per_token = static_cast<double>(r.total_pairs) / static_cast<double>(r.emitted);
  return r;
}

CostReport attention_cost(std::int64_t frames, std::int64_t tokens, std::int64_t c, std::int64_t b,
                          bool attend_prev_eos) {
  const ChunkPlan plan = chunk_plan(frames, c);
  std::vector<std::int64_t> lengths;
  for (std::int64_t k = 0; k < plan.num_chunks(); ++k) lengths.push_back(plan.length(k));
  CostReport r = attention_cost(lengths, spread_tokens(tokens, plan.num_chunks()), b, attend_prev_eos);
  r.chunk_frames = c;
  return r;
}

std::int64_t attention_pairs_bruteforce(const InterleavedSequence& seq, std::int64_t b, bool attend_prev_eos) {
  std::int64_t count = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const SlotKey q{static_cast<std::int64_t>(i), seq.slots[i].chunk, seq.slots[i].role};
    for (std::size_t j = 0; j < seq.size(); ++j) {
      const SlotKey k{static_cast<std::int64_t>(j), seq.slots[j].chunk, seq.slots[j].role};
      if (mask_allowed(q, k, b, attend_prev_eos)) ++count;
    }
  }
  return count;
}

}  // namespace chunkasr
