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
#include <string>

#include "chunkasr/data/features.hpp"

namespace chunkasr {

/// Architecture plus streaming geometry. `chunk_frames`, `context_chunks`
/// and `enc_left_chunks` accept kUnbounded.
struct ModelConfig {
  int text_vocab = 12;
  int input_dim = 32;  // stacked feature width (raw dim x stride)

  int enc_layers = 2;
  int enc_heads = 4;
  int enc_dim = 64;
  int enc_ffn = 128;
  std::int64_t enc_left_chunks = 2;
  int lookahead = 2;  // encoder lookahead frames past the chunk end

  int dec_layers = 2;
  int dec_heads = 4;
  int dec_dim = 64;
  int dec_ffn = 128;

  std::int64_t chunk_frames = 8;
  std::int64_t context_chunks = 2;  // b: previous chunks attendable by the decoder
  bool attend_prev_eos = true;      // false drops earlier chunks' EOS keys
  int max_tokens_per_chunk = 0;     // 0: number of frames in the chunk

  double rope_base = 10000.0;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;

  /// Per-chunk text token cap for a chunk of `chunk_length` frames.
  int token_cap(std::int64_t chunk_length) const {
    return max_tokens_per_chunk > 0 ? max_tokens_per_chunk : static_cast<int>(chunk_length);
  }

  /// Hash over fields that determine parameter shapes. Streaming geometry
  /// (chunk size, context, lookahead, caps) may change between train and
  /// decode without invalidating a checkpoint.
  std::uint64_t architecture_hash() const;

  std::string to_text() const;
  static ModelConfig from_text(const std::string& text);

  bool operator==(const ModelConfig&) const = default;
};

/// "inf" for kUnbounded, decimal otherwise.
std::string format_count(std::int64_t v);
/// Accepts "inf" / "infinity" / "unbounded" or a non-negative integer.
std::int64_t parse_count(const std::string& s);

std::uint64_t fnv1a(const std::string& s);

}  // namespace chunkasr
