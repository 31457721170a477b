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
#include "chunkasr/data/features.hpp"

namespace chunkasr {

enum class SlotRole : std::uint8_t { kAudio, kText, kEos };

/// One position of the decoder input.
struct Slot {
  SlotRole role = SlotRole::kAudio;
  std::int64_t chunk = 0;
  int token = -1;           // text/EOS id; -1 for audio
  std::int64_t frame = -1;  // encoder frame for audio; -1 otherwise
  bool operator==(const Slot&) const = default;
};

/// Per chunk k: audio slots of chunk k, then its text tokens, then one EOS.
struct InterleavedSequence {
  std::vector<Slot> slots;
  std::size_t size() const { return slots.size(); }
};

InterleavedSequence interleave(const ChunkPlan& plan, const SegmentedTranscript& seg, int eos_id);

/// Position/chunk/role of an attention query or key.
struct SlotKey {
  std::int64_t position = 0;
  std::int64_t chunk = 0;
  SlotRole role = SlotRole::kAudio;
};

/// Decoder attention rule: the key is at or before the query, and its chunk
/// lies in [q.chunk - b, q.chunk]. With attend_prev_eos == false, EOS keys
/// of earlier chunks are excluded as well.
bool mask_allowed(const SlotKey& query, const SlotKey& key, std::int64_t context_chunks, bool attend_prev_eos = true);

}  // namespace chunkasr
