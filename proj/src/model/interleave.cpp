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

#include "chunkasr/model/interleave.hpp"

#include "chunkasr/errors.hpp"

namespace chunkasr {

InterleavedSequence interleave(const ChunkPlan& plan, const SegmentedTranscript& seg, int eos_id) {
  if (seg.num_chunks() != plan.num_chunks())
    throw ShapeError("interleave: transcript has " + std::to_string(seg.num_chunks()) + " chunks, plan has " +
                     std::to_string(plan.num_chunks()));
  InterleavedSequence seq;
  seq.slots.reserve(static_cast<std::size_t>(plan.total_frames()) + seg.num_tokens() + seg.chunks.size());
  for (std::int64_t k = 0; k < plan.num_chunks(); ++k) {
    for (std::int64_t t = plan.begin(k); t < plan.end(k); ++t) seq.slots.push_back({SlotRole::kAudio, k, -1, t});
    for (int tok : seg.chunks[static_cast<std::size_t>(k)]) seq.slots.push_back({SlotRole::kText, k, tok, -1});
    seq.slots.push_back({SlotRole::kEos, k, eos_id, -1});
  }
  return seq;
}

bool mask_allowed(const SlotKey& query, const SlotKey& key, std::int64_t context_chunks, bool attend_prev_eos) {
  if (key.position > query.position) return false;
  if (key.chunk > query.chunk) return false;
  if (context_chunks < kUnbounded && key.chunk < query.chunk - context_chunks) return false;
  if (!attend_prev_eos && key.role == SlotRole::kEos && key.chunk < query.chunk) return false;
  return true;
}

}  // namespace chunkasr
