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

// Model and search helpers shared by the unit tests and the acceptance
// runner.

#include <algorithm>
#include <random>
#include <vector>

#include "chunkasr/model/decoder.hpp"
#include "chunkasr/model/encoder.hpp"
#include "test_util.hpp"

namespace chunkasr::testing {

template <typename S>
EncoderOutput<S> run_encoder(Tape<S>& tape, const ParameterSet<S>& params, const ModelConfig& cfg,
                             const Tensor<S>& x, std::int64_t first = 0) {
  BoundParameters<S> bp(tape, params);
  return encoder_forward(bp, cfg, x, first);
}

inline Tensor<float> encode(const Model& m, const Tensor<float>& x) {
  Tape<float> tape(false);
  return run_encoder(tape, m.params, m.config, x).encodings.value();
}

inline Tensor<float> decode_full(const Model& m, const Tensor<float>& enc, const InterleavedSequence& seq,
                          std::int64_t first_position = 0) {
  Tape<float> tape(false);
  BoundParameters<float> bp(tape, m.params);
  return decoder_forward_full(bp, m.config, tape.constant(enc), seq, first_position).value();
}

inline Tensor<double> decode_full_double(const Model& m, const Tensor<float>& enc, const InterleavedSequence& seq,
                                  std::int64_t first_position = 0) {
  const auto params = testing::to_double(m.params);
  Tape<double> tape(false);
  BoundParameters<double> bp(tape, params);
  return decoder_forward_full(bp, m.config, tape.constant(enc.cast<double>()), seq, first_position).value();
}

/// Feeds each chunk's audio as one step and each text/EOS slot on its own.
inline Tensor<float> decode_incremental(const Model& m, const Tensor<float>& enc, const InterleavedSequence& seq,
                                 bool evict, std::size_t* max_cache = nullptr) {
  DecoderCache cache(m.config);
  Tensor<float> out(static_cast<Index>(seq.size()), m.config.text_vocab + 1);
  std::size_t i = 0;
  while (i < seq.size()) {
    std::vector<StepSlot> batch;
    const Slot& first = seq.slots[i];
    if (first.role == SlotRole::kAudio) {
      if (evict) cache_evict(cache, first.chunk, m.config.context_chunks);
      for (; i < seq.size() && seq.slots[i].role == SlotRole::kAudio; ++i)
        batch.push_back({SlotRole::kAudio, seq.slots[i].chunk, -1, enc.row(seq.slots[i].frame)});
    } else {
      batch.push_back({first.role, first.chunk, first.token, {}});
      ++i;
    }
    const Tensor<float> rows = decoder_step(m, cache, batch);
    out.middleRows(static_cast<Index>(i) - rows.rows(), rows.rows()) = rows;
    if (max_cache) *max_cache = std::max(*max_cache, cache.size());
  }
  return out;
}

struct RandomCase {
  Model model;
  Tensor<float> enc;
  InterleavedSequence seq;
};

inline RandomCase random_case(std::mt19937_64& rng, std::int64_t b) {
  ModelConfig cfg = tiny_config();
  cfg.context_chunks = b;
  const std::int64_t frames = std::uniform_int_distribution<std::int64_t>(1, 18)(rng);
  const ChunkPlan plan = chunk_plan(frames, cfg.chunk_frames);
  RandomCase rc{init_model(cfg, rng()), random_matrix(frames, cfg.enc_dim, rng), {}};
  rc.seq = interleave(plan, random_segmentation(plan, cfg.text_vocab, 3, rng), cfg.text_vocab);
  return rc;
}

inline InterleavedSequence figure_sequence() {
  SegmentedTranscript seg;
  seg.chunks = {{1}, {2, 3, 4}};
  return interleave(chunk_plan(8, 4), seg, 5);
}

inline std::vector<std::size_t> attended(const InterleavedSequence& seq, std::size_t q, std::int64_t b, bool prev_eos) {
  std::vector<std::size_t> out;
  auto key = [&](std::size_t i) {
    return SlotKey{static_cast<std::int64_t>(i), seq.slots[i].chunk, seq.slots[i].role};
  };
  for (std::size_t j = 0; j < seq.size(); ++j)
    if (mask_allowed(key(q), key(j), b, prev_eos)) out.push_back(j);
  return out;
}

/// Full-forward log-distribution of the next emission after `tokens`, for a
/// single-chunk sequence of all audio frames followed by the tokens.
inline RowVector<float> next_distribution(const Model& m, const FrameMatrix& frames, const std::vector<int>& tokens) {
  Tape<float> tape(false);
  BoundParameters<float> bp(tape, m.params);
  const auto enc = encoder_forward(bp, m.config, frames);
  InterleavedSequence seq;
  for (Index t = 0; t < frames.rows(); ++t) seq.slots.push_back({SlotRole::kAudio, 0, -1, t});
  for (int tok : tokens) seq.slots.push_back({SlotRole::kText, 0, tok, -1});
  const Tensor<float> lp = decoder_forward_full(bp, m.config, enc.encodings, seq).value();
  return lp.row(lp.rows() - 1);
}

struct Scored {
  std::vector<int> tokens;
  double score;
};

/// Prompt-then-transcript beam search over full recomputation: expand every
/// unfinished hypothesis, keep the top W of finished and extended ones,
/// stop when the top W are all finished.
inline Scored direct_beam(const Model& m, const FrameMatrix& frames, int width) {
  const int eos = m.config.text_vocab;
  const int cap = m.config.token_cap(frames.rows());
  struct H {
    std::vector<int> seq;
    double score;
    bool done;
  };
  std::vector<H> beam = {{{}, 0.0, false}};
  while (true) {
    std::vector<H> cand;
    for (const H& h : beam) {
      if (h.done) {
        cand.push_back(h);
        continue;
      }
      std::vector<int> text(h.seq.begin(), h.seq.end());
      const RowVector<float> next = next_distribution(m, frames, text);
      const int ntext = static_cast<int>(h.seq.size());
      for (int t = 0; t <= eos; ++t) {
        if (ntext >= cap && t != eos) continue;
        H n{h.seq, h.score + next(t), t == eos};
        if (t != eos) n.seq.push_back(t);
        cand.push_back(n);
      }
    }
    std::sort(cand.begin(), cand.end(), [&](const H& a, const H& b) {
      if (a.score != b.score) return a.score > b.score;
      auto ea = a.seq, eb = b.seq;
      if (a.done) ea.push_back(eos);
      if (b.done) eb.push_back(eos);
      return ea < eb;
    });
    cand.resize(std::min<std::size_t>(cand.size(), static_cast<std::size_t>(width)));
    beam = cand;
    if (std::all_of(beam.begin(), beam.end(), [](const H& h) { return h.done; })) break;
  }
  return {beam.front().seq, beam.front().score};
}

}  // namespace chunkasr::testing
