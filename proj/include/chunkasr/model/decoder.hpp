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
#include "chunkasr/model/params.hpp"
#include "chunkasr/numcore/tape.hpp"

namespace chunkasr {

/// Per-slot next-token log-distributions (N x (V+1)) for a whole
/// interleaved sequence. Row i parameterizes the token at slot i+1.
/// `encodings` holds one row per encoder frame referenced by audio slots.
/// Attention follows mask_allowed; rotary positions are slot indices plus
/// `first_position`.
template <typename Scalar>
Var<Scalar> decoder_forward_full(BoundParameters<Scalar>& params, const ModelConfig& cfg, Var<Scalar> encodings,
                                 const InterleavedSequence& seq, std::int64_t first_position = 0);

/// One new decoder input. Audio slots carry their encoder row.
struct StepSlot {
  SlotRole role = SlotRole::kAudio;
  std::int64_t chunk = 0;
  int token = -1;
  RowVector<float> encoding;
};

/// Attention key/value history of one decoding session, tagged per entry
/// with chunk, position and role.
class DecoderCache {
 public:
  explicit DecoderCache(const ModelConfig& cfg, std::int64_t first_position = 0);

  const std::vector<SlotKey>& entries() const { return entries_; }
  std::int64_t current_chunk() const { return current_chunk_; }
  std::int64_t next_position() const { return next_position_; }
  /// Chunks below this index have been evicted.
  std::int64_t evicted_below() const { return evicted_below_; }
  std::int64_t retained_chunks() const;
  std::size_t size() const { return entries_.size(); }

 private:
  friend Tensor<float> decoder_step(const Model&, DecoderCache&, const std::vector<StepSlot>&);
  friend void cache_evict(DecoderCache&, std::int64_t, std::int64_t);

  std::vector<Tensor<float>> keys_;    // per layer, rotated
  std::vector<Tensor<float>> values_;  // per layer
  std::vector<SlotKey> entries_;
  std::int64_t current_chunk_ = -1;
  SlotRole last_role_ = SlotRole::kEos;
  std::int64_t next_position_ = 0;
  std::int64_t evicted_below_ = 0;
};

/// Appends slots to the cache and returns one log-distribution row per new
/// slot. Slots must arrive in interleaved order (audio* text* EOS per chunk,
/// chunks consecutive); anything else, including a slot for an evicted
/// chunk, throws StateError and leaves the cache untouched.
Tensor<float> decoder_step(const Model& model, DecoderCache& cache, const std::vector<StepSlot>& slots);

/// Drops entries of chunks < k - b. No-op for b == kUnbounded.
void cache_evict(DecoderCache& cache, std::int64_t k, std::int64_t context_chunks);

}  // namespace chunkasr
