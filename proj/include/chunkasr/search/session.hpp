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
#include <functional>
#include <vector>

#include "chunkasr/data/features.hpp"
#include "chunkasr/data/vocab.hpp"
#include "chunkasr/model/decoder.hpp"
#include "chunkasr/model/encoder.hpp"

namespace chunkasr {

/// One beam entry. `emissions` holds text ids and one EOS (= V) per
/// finished chunk; `score` is the summed model log-probability of all of
/// them.
struct Hypothesis {
  std::vector<int> emissions;
  double score = 0.0;
  int chunk_tokens = 0;   // text tokens emitted in the current chunk
  int chunk_emitted = 0;  // text tokens plus EOS emitted in the current chunk
  bool frozen = false;    // ended the current chunk with EOS
  DecoderCache cache;
  RowVector<float> next;  // log-distribution of the next emission

  explicit Hypothesis(const ModelConfig& cfg) : cache(cfg) {}
};

/// Output of one push: newly confirmed tokens (shared by every beam member,
/// never revised) and the current provisional tail of the best hypothesis.
struct TranscriptDelta {
  std::vector<std::int64_t> chunks_decoded;
  TokenSeq confirmed;
  TokenSeq provisional;
};

struct ChunkTrace {
  std::int64_t chunk = 0;
  TokenSeq best_tokens;  // the best hypothesis's tokens for this chunk
  bool forced_eos = false;
  TokenSeq confirmed;    // newly confirmed after this chunk
  TokenSeq provisional;
};

struct SessionStats {
  std::int64_t search_steps = 0;  // synchrony checks performed
  std::size_t max_cache_entries = 0;
  std::int64_t max_retained_chunks = 0;
  int max_chunk_tokens = 0;
};

struct SessionResult {
  TokenSeq transcript;
  std::vector<int> emissions;
  double score = 0.0;
  SessionStats stats;
  std::vector<ChunkTrace> trace;
};

/// Alignment-synchronous streaming decoder for one utterance.
///
/// Each push carries at most one chunk (c frames); a chunk shorter than c
/// ends the input. A chunk is decoded as soon as its lookahead frames are
/// available, otherwise at finalize. Within a chunk every live hypothesis
/// extends by exactly one emission per step; a hypothesis that emits EOS is
/// frozen but keeps competing with its fixed score, and the chunk ends once
/// the top `beam_width` candidates are all frozen. Ties go to the
/// lexicographically smaller emission sequence.
class StreamingSession {
 public:
  StreamingSession(const Model& model, int beam_width = 1);

  TranscriptDelta push_chunk(const FrameMatrix& stacked_frames);
  SessionResult finalize();

  bool finalized() const { return finalized_; }
  const std::vector<Hypothesis>& beam() const { return hyps_; }

  /// Called after every search step with the chunk index, the 0-based step
  /// within the chunk and the surviving beam.
  using StepObserver = std::function<void(std::int64_t, int, const std::vector<Hypothesis>&)>;
  void set_step_observer(StepObserver fn) { observer_ = std::move(fn); }
  const SessionStats& stats() const { return stats_; }

 private:
  void decode_ready(bool input_finished, TranscriptDelta& delta);
  void decode_chunk(std::int64_t k, TranscriptDelta& delta);

  const Model& model_;
  int beam_width_;
  StreamingEncoder encoder_;
  std::vector<Hypothesis> hyps_;
  std::int64_t next_chunk_ = 0;
  bool short_chunk_seen_ = false;
  bool finalized_ = false;
  std::size_t confirmed_ = 0;
  SessionStats stats_;
  std::vector<ChunkTrace> trace_;
  StepObserver observer_;
};

/// Splits stacked frames into chunks of c, pushes them and finalizes.
SessionResult decode_utterance(const Model& model, const FrameMatrix& stacked_frames, int beam_width);

/// Per-chunk argmax decoding (lowest id on ties), EOS forced at the token
/// cap. Same result as a width-1 session.
SessionResult greedy_decode(const Model& model, const FrameMatrix& stacked_frames);

/// Sum of log P over all emissions under a full (non-incremental) forward
/// pass in double precision. `emissions` must contain exactly one EOS per
/// chunk.
double rescore_emissions(const Model& model, const FrameMatrix& stacked_frames, const std::vector<int>& emissions);

/// Splits an emission sequence at EOS markers.
SegmentedTranscript split_emissions(const std::vector<int>& emissions, int eos_id);

}  // namespace chunkasr
