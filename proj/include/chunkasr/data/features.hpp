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

#include "chunkasr/numcore/tensor.hpp"

namespace chunkasr {

/// T x d matrix of frames, one frame per row.
using FrameMatrix = Tensor<float>;

inline constexpr int kDefaultStride = 4;

/// Time reduction: output row i concatenates input rows stride*i ..
/// stride*i + stride-1; a trailing partial group is zero-padded.
FrameMatrix stack_frames(const FrameMatrix& features, int stride = kDefaultStride);

/// Sentinel for "unbounded" chunk size or context.
inline constexpr std::int64_t kUnbounded = INT64_MAX / 4;

/// Static-size partition of T' encoder frames into K contiguous chunks.
class ChunkPlan {
 public:
  ChunkPlan() = default;

  std::int64_t chunk_frames() const { return chunk_frames_; }
  std::int64_t total_frames() const { return total_frames_; }
  std::int64_t num_chunks() const { return static_cast<std::int64_t>(boundaries_.size()) - 1; }
  /// K+1 boundaries: 0 = b_0 < b_1 < ... < b_K = T'.
  const std::vector<std::int64_t>& boundaries() const { return boundaries_; }

  std::int64_t begin(std::int64_t k) const { return boundaries_[static_cast<std::size_t>(k)]; }
  std::int64_t end(std::int64_t k) const { return boundaries_[static_cast<std::size_t>(k) + 1]; }
  std::int64_t length(std::int64_t k) const { return end(k) - begin(k); }
  std::int64_t chunk_of(std::int64_t frame) const;

  friend ChunkPlan chunk_plan(std::int64_t total_frames, std::int64_t chunk_frames);
  bool operator==(const ChunkPlan&) const = default;

 private:
  std::int64_t chunk_frames_ = 0;
  std::int64_t total_frames_ = 0;
  std::vector<std::int64_t> boundaries_{0};
};

/// K = ceil(T'/c); every chunk has length c except possibly the last.
/// `chunk_frames` may be kUnbounded (a single chunk).
ChunkPlan chunk_plan(std::int64_t total_frames, std::int64_t chunk_frames);

}  // namespace chunkasr
