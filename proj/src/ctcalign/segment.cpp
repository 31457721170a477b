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

#include "chunkasr/ctcalign/segment.hpp"

#include <cmath>
#include <string>

#include "chunkasr/errors.hpp"

namespace chunkasr {

std::size_t SegmentedTranscript::num_tokens() const {
  std::size_t n = 0;
  for (const auto& c : chunks) n += c.size();
  return n;
}

TokenSeq SegmentedTranscript::flatten() const {
  TokenSeq out;
  for (const auto& c : chunks) out.insert(out.end(), c.begin(), c.end());
  return out;
}

SegmentedTranscript segment_transcript(const TokenSeq& transcript, const std::vector<std::int64_t>& end_frames,
                                       const ChunkPlan& plan) {
  if (transcript.size() != end_frames.size())
    throw ShapeError("segment_transcript: " + std::to_string(end_frames.size()) + " end frames for " +
                     std::to_string(transcript.size()) + " tokens");
  SegmentedTranscript seg;
  seg.chunks.resize(static_cast<std::size_t>(plan.num_chunks()));
  for (std::size_t u = 0; u < transcript.size(); ++u) {
    if (end_frames[u] < 0 || end_frames[u] >= plan.total_frames())
      throw ShapeError("segment_transcript: end frame " + std::to_string(end_frames[u]) + " outside utterance");
    seg.chunks[static_cast<std::size_t>(plan.chunk_of(end_frames[u]))].push_back(transcript[u]);
  }
  return seg;
}

namespace {
void check_lengths(std::size_t a, std::size_t b, const char* op) {
  if (a != b) throw ShapeError(std::string(op) + ": " + std::to_string(a) + " vs " + std::to_string(b) + " tokens");
  if (a == 0) throw ShapeError(std::string(op) + ": no tokens");
}
}  // namespace

double alignment_delay(const std::vector<std::int64_t>& t, const std::vector<std::int64_t>& t_ref) {
  check_lengths(t.size(), t_ref.size(), "alignment_delay");
  double acc = 0;
  for (std::size_t u = 0; u < t.size(); ++u) acc += static_cast<double>(t[u] - t_ref[u]);
  return acc / static_cast<double>(t.size());
}

double alignment_delta(const std::vector<std::int64_t>& t, const std::vector<std::int64_t>& t_ref) {
  check_lengths(t.size(), t_ref.size(), "alignment_delta");
  double acc = 0;
  for (std::size_t u = 0; u < t.size(); ++u) acc += std::abs(static_cast<double>(t[u] - t_ref[u]));
  return acc / static_cast<double>(t.size());
}

}  // namespace chunkasr
