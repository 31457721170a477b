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
#include <optional>
#include <vector>

#include "chunkasr/data/features.hpp"
#include "chunkasr/data/vocab.hpp"

namespace chunkasr {

struct Utterance {
  FrameMatrix features;  // T x d, before stacking
  TokenSeq transcript;
  /// Last encoder frame (post-stacking index) of each token, if known.
  std::optional<std::vector<std::int64_t>> ref_end_frames;

  bool operator==(const Utterance& o) const {
    return features.rows() == o.features.rows() && features.cols() == o.features.cols() &&
           features == o.features && transcript == o.transcript && ref_end_frames == o.ref_end_frames;
  }
};

/// Alignment-known synthetic corpus parameters. Durations are in encoder
/// frames; each encoder frame is `stride` raw frames of the token's
/// template vector plus Gaussian noise.
struct SyntheticSpec {
  int vocab_size = 12;
  int feature_dim = 8;
  int min_duration = 1;
  int max_duration = 3;
  double noise_stddev = 0.0;
  int min_tokens = 4;
  int max_tokens = 12;
  int stride = kDefaultStride;
  std::uint64_t template_seed = 7;
  std::uint64_t seed = 1;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

/// Per-token template vectors (vocab_size x feature_dim), a function of
/// template_seed only.
FrameMatrix synth_templates(const SyntheticSpec& spec);

/// Generates `n` utterances. Consecutive tokens always differ and the first
/// and last token of an utterance differ, so token runs are separable and
/// concatenated utterances stay separable too. Deterministic in the spec.
std::vector<Utterance> synth_generate(const SyntheticSpec& spec, int n);

/// Number of post-stacking frames of an utterance.
std::int64_t encoder_frames(const Utterance& u, int stride = kDefaultStride);

/// Utterance repeated `times` times (features and transcript), with
/// `gap_frames` zero encoder frames (stride raw frames each) between copies.
Utterance repeat_utterance(const Utterance& u, int times, int gap_frames = 0, int stride = kDefaultStride);

}  // namespace chunkasr
