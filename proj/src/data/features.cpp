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

#include "chunkasr/data/features.hpp"

#include "chunkasr/errors.hpp"

namespace chunkasr {

FrameMatrix stack_frames(const FrameMatrix& features, int stride) {
  if (features.rows() < 1) throw ShapeError("stack_frames: empty input");
  if (stride < 1) throw ShapeError("stack_frames: stride must be positive");
  const Index d = features.cols();
  const Index out_rows = (features.rows() + stride - 1) / stride;
  FrameMatrix out = FrameMatrix::Zero(out_rows, d * stride);
  for (Index t = 0; t < features.rows(); ++t) out.block(t / stride, (t % stride) * d, 1, d) = features.row(t);
  return out;
}

ChunkPlan chunk_plan(std::int64_t total_frames, std::int64_t chunk_frames) {
  if (total_frames <= 0) throw ShapeError("chunk_plan: no frames to chunk");
  if (chunk_frames < 1) throw ShapeError("chunk_plan: chunk size must be >= 1");
  ChunkPlan p;
  p.chunk_frames_ = chunk_frames;
  p.total_frames_ = total_frames;
  p.boundaries_.clear();
  for (std::int64_t b = 0; b < total_frames; b += std::min(chunk_frames, total_frames - b)) p.boundaries_.push_back(b);
  p.boundaries_.push_back(total_frames);
  return p;
}

std::int64_t ChunkPlan::chunk_of(std::int64_t frame) const {
  if (frame < 0 || frame >= total_frames_) throw ShapeError("chunk_of: frame outside plan");
  return frame / chunk_frames_;
}

}  // namespace chunkasr
