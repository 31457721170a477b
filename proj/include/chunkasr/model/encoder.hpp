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

#include "chunkasr/data/features.hpp"
#include "chunkasr/model/params.hpp"
#include "chunkasr/numcore/tape.hpp"

namespace chunkasr {

template <typename Scalar>
struct EncoderOutput {
  Var<Scalar> encodings;     // T' x enc_dim
  Var<Scalar> ctc_logprobs;  // T' x (V+1), blank in the last column
};

/// Chunked streaming encoder.
///
/// All layers are block-causal: frame t in chunk k attends to frames of
/// chunks [k - enc_left_chunks, k]. The last layer additionally attends to
/// the input projection of the lookahead frames [end(k), t + lookahead]. So
/// frame t depends on chunks <= k and on at most `lookahead` frames past t,
/// and a single chunk with no lookahead is plain full self-attention.
///
/// `features` are stacked frames; `first_frame` is the absolute index of
/// row 0 (rotary positions and chunk boundaries are taken relative to it and
/// it must be a chunk boundary).
template <typename Scalar>
EncoderOutput<Scalar> encoder_forward(BoundParameters<Scalar>& params, const ModelConfig& cfg,
                                      const Tensor<Scalar>& features, std::int64_t first_frame = 0);

/// Incremental encoder for streaming sessions. Encodes chunk k from a
/// window that covers its full receptive field, so results match
/// encoder_forward over the whole utterance up to float rounding.
class StreamingEncoder {
 public:
  StreamingEncoder(const Model& model);

  void push(const FrameMatrix& stacked_frames);
  std::int64_t frames_available() const { return frames_.rows(); }
  /// Chunk k's frames and its lookahead are all present.
  bool ready(std::int64_t k, bool input_finished) const;
  /// Encodings (rows of chunk k) and CTC log-probs for chunk k.
  std::pair<Tensor<float>, Tensor<float>> encode_chunk(std::int64_t k) const;

 private:
  const Model& model_;
  FrameMatrix frames_;
};

}  // namespace chunkasr
