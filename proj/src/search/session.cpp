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

#include "chunkasr/search/session.hpp"

#include <algorithm>

#include "chunkasr/errors.hpp"

namespace chunkasr {

namespace {

struct Candidate {
  std::size_t parent;
  int token;  // -1 carries a frozen hypothesis unchanged
  double score;
};

std::vector<StepSlot> audio_slots(const Tensor<float>& enc, std::int64_t k) {
  std::vector<StepSlot> slots;
  slots.reserve(static_cast<std::size_t>(enc.rows()));
  for (Index r = 0; r < enc.rows(); ++r) slots.push_back({SlotRole::kAudio, k, -1, enc.row(r)});
  return slots;
}

TokenSeq text_only(const std::vector<int>& emissions, int eos) {
  TokenSeq out;
  for (int t : emissions)
    if (t != eos) out.push_back(t);
  return out;
}

void note_cache(SessionStats& stats, const DecoderCache& cache) {
  stats.max_cache_entries = std::max(stats.max_cache_entries, cache.size());
  stats.max_retained_chunks = std::max(stats.max_retained_chunks, cache.retained_chunks());
}

}  // namespace

StreamingSession::StreamingSession(const Model& model, int beam_width)
    : model_(model), beam_width_(beam_width), encoder_(model) {
  if (beam_width < 1) throw ConfigError("beam width must be >= 1");
  model.config.validate();
  hyps_.emplace_back(model.config);
}

TranscriptDelta StreamingSession::push_chunk(const FrameMatrix& frames) {
  if (finalized_) throw StateError("push_chunk after finalize");
  if (short_chunk_seen_) throw StateError("push_chunk after a partial chunk; a short chunk must be the last one");
  const std::int64_t c = model_.config.chunk_frames;
  if (frames.rows() < 1) throw ShapeError("push_chunk: empty chunk");
  if (frames.rows() > c)
    throw ShapeError("push_chunk: " + std::to_string(frames.rows()) + " frames exceed the chunk size " +
                     std::to_string(c));
  if (c < kUnbounded && frames.rows() < c) short_chunk_seen_ = true;
  encoder_.push(frames);
  TranscriptDelta delta;
  decode_ready(false, delta);
  return delta;
}

SessionResult StreamingSession::finalize() {
  if (finalized_) throw StateError("finalize called twice");
  if (encoder_.frames_available() == 0) throw StateError("finalize before any chunk was pushed");
  TranscriptDelta delta;
  decode_ready(true, delta);
  finalized_ = true;
  const Hypothesis& best = hyps_.front();
  SessionResult r;
  r.emissions = best.emissions;
  r.transcript = text_only(best.emissions, model_.config.text_vocab);
  r.score = best.score;
  r.stats = stats_;
  r.trace = trace_;
  return r;
}

void StreamingSession::decode_ready(bool input_finished, TranscriptDelta& delta) {
  while (encoder_.ready(next_chunk_, input_finished)) decode_chunk(next_chunk_++, delta);
}

void StreamingSession::decode_chunk(std::int64_t k, TranscriptDelta& delta) {
  const ModelConfig& cfg = model_.config;
  const int eos = cfg.text_vocab;
  const auto [enc, ctc] = encoder_.encode_chunk(k);
  const std::vector<StepSlot> audio = audio_slots(enc, k);
  for (Hypothesis& h : hyps_) {
    cache_evict(h.cache, k, cfg.context_chunks);
    const Tensor<float> out = decoder_step(model_, h.cache, audio);
    h.next = out.row(out.rows() - 1);
    h.frozen = false;
    h.chunk_tokens = 0;
    h.chunk_emitted = 0;
    note_cache(stats_, h.cache);
  }
  const int cap = cfg.token_cap(enc.rows());

  auto emission_less = [&](const Candidate& a, const Candidate& b) {
    const auto& ea = hyps_[a.parent].emissions;
    const auto& eb = hyps_[b.parent].emissions;
    std::vector<int> sa = ea, sb = eb;
    if (a.token >= 0) sa.push_back(a.token);
    if (b.token >= 0) sb.push_back(b.token);
    return sa < sb;
  };
  auto better = [&](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return emission_less(a, b);
  };

  std::vector<bool> forced(hyps_.size(), false);
  for (int step = 0;; ++step) {
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < hyps_.size(); ++i) {
      const Hypothesis& h = hyps_[i];
      if (h.frozen) {
        cands.push_back({i, -1, h.score});
      } else if (h.chunk_tokens >= cap) {
        cands.push_back({i, eos, h.score + h.next(eos)});
      } else {
        for (int t = 0; t <= eos; ++t) cands.push_back({i, t, h.score + h.next(t)});
      }
    }
    const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(beam_width_), cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep), cands.end(), better);
    cands.resize(keep);
    const bool done = std::all_of(cands.begin(), cands.end(), [](const Candidate& c) { return c.token < 0; });

    std::vector<Hypothesis> next;
    std::vector<bool> next_forced;
    next.reserve(keep);
    for (const Candidate& c : cands) {
      Hypothesis h = hyps_[c.parent];
      bool f = forced[c.parent];
      if (c.token >= 0) {
        h.emissions.push_back(c.token);
        h.score = c.score;
        ++h.chunk_emitted;
        if (c.token == eos) {
          h.frozen = true;  // the EOS slot is fed once the chunk ends
          f = h.chunk_tokens >= cap;
        } else {
          ++h.chunk_tokens;
          const Tensor<float> out = decoder_step(model_, h.cache, {{SlotRole::kText, k, c.token, {}}});
          h.next = out.row(0);
          note_cache(stats_, h.cache);
        }
        if (h.chunk_emitted != step + 1)
          throw StateError("alignment synchrony violated: hypothesis has " + std::to_string(h.chunk_emitted) +
                           " emissions in chunk " + std::to_string(k) + " at step " + std::to_string(step + 1));
      }
      stats_.max_chunk_tokens = std::max(stats_.max_chunk_tokens, h.chunk_tokens);
      next.push_back(std::move(h));
      next_forced.push_back(f);
    }
    hyps_ = std::move(next);
    forced = std::move(next_forced);
    ++stats_.search_steps;
    if (observer_) observer_(k, step, hyps_);
    if (done) break;
  }

  for (Hypothesis& h : hyps_) {
    decoder_step(model_, h.cache, {{SlotRole::kEos, k, eos, {}}});
    note_cache(stats_, h.cache);
  }

  // Confirmed prefix: tokens shared by every beam member.
  std::vector<TokenSeq> texts;
  for (const Hypothesis& h : hyps_) texts.push_back(text_only(h.emissions, eos));
  std::size_t common = texts.front().size();
  for (const TokenSeq& t : texts) {
    std::size_t n = 0;
    while (n < common && n < t.size() && t[n] == texts.front()[n]) ++n;
    common = n;
  }
  ChunkTrace tr;
  tr.chunk = k;
  const auto& best = hyps_.front().emissions;
  auto it = best.end() - 1;  // this chunk's EOS
  auto start = it;
  while (start != best.begin() && *(start - 1) != eos) --start;
  tr.best_tokens.assign(start, it);
  tr.forced_eos = forced.front();
  if (common > confirmed_) {
    tr.confirmed.assign(texts.front().begin() + static_cast<std::ptrdiff_t>(confirmed_),
                        texts.front().begin() + static_cast<std::ptrdiff_t>(common));
    confirmed_ = common;
  }
  tr.provisional.assign(texts.front().begin() + static_cast<std::ptrdiff_t>(common), texts.front().end());
  delta.chunks_decoded.push_back(k);
  delta.confirmed.insert(delta.confirmed.end(), tr.confirmed.begin(), tr.confirmed.end());
  delta.provisional = tr.provisional;
  trace_.push_back(std::move(tr));
}

SessionResult decode_utterance(const Model& model, const FrameMatrix& frames, int beam_width) {
  StreamingSession session(model, beam_width);
  const std::int64_t c = std::min<std::int64_t>(model.config.chunk_frames, std::max<Index>(frames.rows(), 1));
  for (Index start = 0; start < frames.rows(); start += c)
    session.push_chunk(frames.middleRows(start, std::min<Index>(c, frames.rows() - start)));
  return session.finalize();
}

SessionResult greedy_decode(const Model& model, const FrameMatrix& frames) {
  const ModelConfig& cfg = model.config;
  const int eos = cfg.text_vocab;
  StreamingEncoder encoder(model);
  encoder.push(frames);
  DecoderCache cache(cfg);
  SessionResult r;
  for (std::int64_t k = 0; encoder.ready(k, true); ++k) {
    const auto [enc, ctc] = encoder.encode_chunk(k);
    cache_evict(cache, k, cfg.context_chunks);
    Tensor<float> out = decoder_step(model, cache, audio_slots(enc, k));
    RowVector<float> next = out.row(out.rows() - 1);
    const int cap = cfg.token_cap(enc.rows());
    ChunkTrace tr;
    tr.chunk = k;
    for (int emitted = 0;; ++emitted) {
      int t = eos;
      if (emitted < cap) next.maxCoeff(&t);
      else tr.forced_eos = true;
      r.emissions.push_back(t);
      r.score += next(t);
      note_cache(r.stats, cache);
      if (t == eos) {
        decoder_step(model, cache, {{SlotRole::kEos, k, eos, {}}});
        break;
      }
      r.transcript.push_back(t);
      tr.best_tokens.push_back(t);
      tr.confirmed.push_back(t);
      out = decoder_step(model, cache, {{SlotRole::kText, k, t, {}}});
      next = out.row(0);
    }
    r.stats.max_chunk_tokens = std::max(r.stats.max_chunk_tokens, static_cast<int>(tr.best_tokens.size()));
    r.trace.push_back(std::move(tr));
  }
  return r;
}

SegmentedTranscript split_emissions(const std::vector<int>& emissions, int eos_id) {
  SegmentedTranscript seg;
  TokenSeq cur;
  for (int t : emissions) {
    if (t == eos_id) {
      seg.chunks.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(t);
    }
  }
  if (!cur.empty()) throw ShapeError("emissions do not end with EOS");
  return seg;
}

double rescore_emissions(const Model& model, const FrameMatrix& frames, const std::vector<int>& emissions) {
  const ModelConfig& cfg = model.config;
  const SegmentedTranscript seg = split_emissions(emissions, cfg.text_vocab);
  const ChunkPlan plan = chunk_plan(frames.rows(), cfg.chunk_frames);
  if (seg.num_chunks() != plan.num_chunks())
    throw ShapeError("rescore: " + std::to_string(seg.num_chunks()) + " EOS markers for " +
                     std::to_string(plan.num_chunks()) + " chunks");
  // Evaluated in double so the reference does not add its own float32
  // rounding to the comparison with incrementally accumulated scores.
  const ParameterSet<double> params = cast_parameters<double>(model.params);
  Tape<double> tape(false);
  BoundParameters<double> bp(tape, params);
  const Tensor<double> x = frames.cast<double>();
  const auto enc = encoder_forward(bp, cfg, x);
  const InterleavedSequence seq = interleave(plan, seg, cfg.text_vocab);
  const Tensor<double> lp = decoder_forward_full(bp, cfg, enc.encodings, seq).value();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i)
    if (seq.slots[i + 1].role != SlotRole::kAudio) total += lp(static_cast<Index>(i), seq.slots[i + 1].token);
  return total;
}

}  // namespace chunkasr
