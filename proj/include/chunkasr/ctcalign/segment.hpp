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

/// Transcript split into K per-chunk token lists. Each list is implicitly
/// terminated by EOS.
struct SegmentedTranscript {
  std::vector<TokenSeq> chunks;

  std::int64_t num_chunks() const { return static_cast<std::int64_t>(chunks.size()); }
  std::size_t num_tokens() const;
  TokenSeq flatten() const;
  bool operator==(const SegmentedTranscript&) const = default;
};

/// Token u goes to chunk floor(end_frames[u] / c). Chunks without tokens get
/// an empty (EOS-only) list.
SegmentedTranscript segment_transcript(const TokenSeq& transcript, const std::vector<std::int64_t>& end_frames,
                                       const ChunkPlan& plan);

/// Signed mean end-time difference (1/U) sum(t - t_ref), in frames.
/// Negative means `t` is ahead of the reference.
double alignment_delay(const std::vector<std::int64_t>& t, const std::vector<std::int64_t>& t_ref);

/// Mean absolute end-time difference (1/U) sum |t - t_ref|, in frames.
double alignment_delta(const std::vector<std::int64_t>& t, const std::vector<std::int64_t>& t_ref);

}  // namespace chunkasr
