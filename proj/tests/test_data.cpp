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

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "chunkasr/data/dataset_io.hpp"
#include "chunkasr/data/synth.hpp"
#include "chunkasr/data/vocab.hpp"
#include "chunkasr/errors.hpp"

namespace chunkasr {
namespace {

TEST(Vocab, ReservedIdsFollowText) {
  const Vocab v(12);
  EXPECT_EQ(v.eos(), 12);
  EXPECT_EQ(v.blank(), 13);
  EXPECT_FALSE(v.is_text(v.eos()));
  EXPECT_FALSE(v.is_text(v.blank()));
  EXPECT_EQ(v.ctc_blank_column(), 12);
  EXPECT_EQ(strip_eos({3, 12, 4, 12, 12}, v), (TokenSeq{3, 4}));
}

TEST(StackFrames, ExactMultiple) {
  FrameMatrix f(8, 2);
  for (Index i = 0; i < f.size(); ++i) f.data()[i] = static_cast<float>(i);
  const FrameMatrix s = stack_frames(f);
  ASSERT_EQ(s.rows(), 2);
  ASSERT_EQ(s.cols(), 8);
  for (Index j = 0; j < 8; ++j) EXPECT_EQ(s(1, j), static_cast<float>(8 + j));
}

TEST(StackFrames, RemainderIsZeroPadded) {
  const FrameMatrix f = FrameMatrix::Ones(10, 2);
  const FrameMatrix s = stack_frames(f);
  ASSERT_EQ(s.rows(), 3);
  EXPECT_EQ(s.row(2).head(4).sum(), 4.0f);
  EXPECT_EQ(s.row(2).tail(4).cwiseAbs().sum(), 0.0f);
}

TEST(StackFrames, RowCountIsCeilingForAllLengths) {
  for (Index t = 1; t <= 130; ++t) EXPECT_EQ(stack_frames(FrameMatrix::Zero(t, 3)).rows(), (t + 3) / 4);
  EXPECT_EQ(stack_frames(FrameMatrix::Zero(128, 80)).rows(), 32);
  EXPECT_THROW(stack_frames(FrameMatrix::Zero(0, 3)), ShapeError);
}

TEST(ChunkPlan, Examples) {
  EXPECT_EQ(chunk_plan(100, 32).boundaries(), (std::vector<std::int64_t>{0, 32, 64, 96, 100}));
  EXPECT_EQ(chunk_plan(32, 32).num_chunks(), 1);
  const ChunkPlan p = chunk_plan(5, 32);
  EXPECT_EQ(p.num_chunks(), 1);
  EXPECT_EQ(p.length(0), 5);
  EXPECT_EQ(chunk_plan(7, kUnbounded).num_chunks(), 1);
  EXPECT_THROW(chunk_plan(0, 4), ShapeError);
  EXPECT_THROW(chunk_plan(4, 0), ShapeError);
}

TEST(ChunkPlan, PartitionsEveryLength) {
  for (std::int64_t t = 1; t <= 60; ++t)
    for (std::int64_t c = 1; c <= 12; ++c) {
      const ChunkPlan p = chunk_plan(t, c);
      EXPECT_EQ(p.num_chunks(), (t + c - 1) / c);
      std::int64_t covered = 0;
      for (std::int64_t k = 0; k < p.num_chunks(); ++k) {
        EXPECT_EQ(p.begin(k), covered);
        if (k + 1 < p.num_chunks()) EXPECT_EQ(p.length(k), c);
        for (std::int64_t f = p.begin(k); f < p.end(k); ++f) EXPECT_EQ(p.chunk_of(f), k);
        covered = p.end(k);
      }
      EXPECT_EQ(covered, t);
    }
}

TEST(Synth, NoiseFreeRunsAreConstant) {
  SyntheticSpec spec;
  const auto utts = synth_generate(spec, 20);
  for (const auto& u : utts) {
    const FrameMatrix s = stack_frames(u.features, spec.stride);
    std::int64_t start = 0;
    for (std::size_t j = 0; j < u.transcript.size(); ++j) {
      const std::int64_t end = (*u.ref_end_frames)[j];
      for (std::int64_t f = start; f <= end; ++f) EXPECT_TRUE(s.row(f) == s.row(start));
      start = end + 1;
    }
  }
}

TEST(Synth, UnitDurationsGiveOneFramePerToken) {
  SyntheticSpec spec;
  spec.min_duration = spec.max_duration = 1;
  spec.min_tokens = spec.max_tokens = 3;
  const auto u = synth_generate(spec, 1).front();
  EXPECT_EQ(encoder_frames(u, spec.stride), 3);
  EXPECT_EQ(*u.ref_end_frames, (std::vector<std::int64_t>{0, 1, 2}));
}

TEST(Synth, EndFramesStrictlyIncreaseAndCoverUtterance) {
  SyntheticSpec spec;
  spec.noise_stddev = 0.3;
  spec.max_duration = 5;
  for (const auto& u : synth_generate(spec, 200)) {
    const auto& e = *u.ref_end_frames;
    ASSERT_EQ(e.size(), u.transcript.size());
    for (std::size_t j = 1; j < e.size(); ++j) EXPECT_LT(e[j - 1], e[j]);
    EXPECT_EQ(e.back(), encoder_frames(u, spec.stride) - 1);
    for (int t : u.transcript) EXPECT_TRUE(t >= 0 && t < spec.vocab_size);
  }
}

TEST(Synth, DeterministicPerSeed) {
  SyntheticSpec spec;
  spec.noise_stddev = 0.5;
  EXPECT_EQ(synth_generate(spec, 30), synth_generate(spec, 30));
  SyntheticSpec other = spec;
  other.seed = spec.seed + 1;
  EXPECT_FALSE(synth_generate(spec, 30) == synth_generate(other, 30));
}

TEST(Synth, RejectsInvalidSpec) {
  SyntheticSpec spec;
  spec.min_duration = 0;
  EXPECT_THROW(synth_generate(spec, 1), ConfigError);
}

TEST(Synth, RepeatUtteranceConcatenates) {
  SyntheticSpec spec;
  const auto u = synth_generate(spec, 1).front();
  const auto r = repeat_utterance(u, 3, 2, spec.stride);
  const auto t = encoder_frames(u, spec.stride);
  EXPECT_EQ(encoder_frames(r, spec.stride), 3 * t + 4);
  EXPECT_EQ(r.transcript.size(), 3 * u.transcript.size());
  EXPECT_EQ((*r.ref_end_frames)[u.transcript.size()], (*u.ref_end_frames)[0] + t + 2);
}

TEST(DatasetIo, RoundTripsEmptyAndSynthetic) {
  EXPECT_TRUE(decode_dataset(encode_dataset({})).empty());
  SyntheticSpec spec;
  spec.noise_stddev = 0.2;
  auto utts = synth_generate(spec, 100);
  utts[3].ref_end_frames.reset();
  EXPECT_EQ(decode_dataset(encode_dataset(utts)), utts);

  const auto path = std::filesystem::temp_directory_path() / "chunkasr_test_data.cads";
  save_dataset(path, utts);
  EXPECT_EQ(load_dataset(path), utts);
  std::filesystem::remove(path);
}

TEST(DatasetIo, TruncationReportsOffset) {
  SyntheticSpec spec;
  const std::string bytes = encode_dataset(synth_generate(spec, 5));
  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{17}, bytes.size() / 2, bytes.size() - 1}) {
    try {
      decode_dataset(bytes.substr(0, cut));
      ADD_FAILURE() << "truncated at " << cut << " decoded";
    } catch (const FormatError& e) {
      EXPECT_LE(e.offset(), cut);
    }
  }
  std::string bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_dataset(bad), FormatError);
  EXPECT_THROW(decode_dataset(bytes + "x"), FormatError);
}

}  // namespace
}  // namespace chunkasr
