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

#include "chunkasr/model/decoder.hpp"

#include <algorithm>
#include <optional>

#include "chunkasr/errors.hpp"
#include "chunkasr/model/layers.hpp"

namespace chunkasr {

namespace {

template <typename Scalar>
struct LayerOut {
  Var<Scalar> x;
  Var<Scalar> k;  // rotated keys of the new rows
  Var<Scalar> v;
};

/// One pre-norm decoder block over new rows `x`, attending to optional
/// cached keys/values followed by the new rows themselves.
template <typename Scalar>
LayerOut<Scalar> decoder_layer(BoundParameters<Scalar>& p, const ModelConfig& cfg, int l, Var<Scalar> x,
                               const std::vector<std::int64_t>& pos, std::optional<Var<Scalar>> past_k,
                               std::optional<Var<Scalar>> past_v, const Tensor<Scalar>& bias) {
  const std::string pre = "dec.l" + std::to_string(l);
  const int hd = cfg.dec_dim / cfg.dec_heads;
  auto a = norm(p, x, pre + ".ln1");
  auto q = rotary(matmul(a, p(pre + ".wq")), pos, hd, cfg.rope_base);
  auto k = rotary(matmul(a, p(pre + ".wk")), pos, hd, cfg.rope_base);
  auto v = matmul(a, p(pre + ".wv"));
  Var<Scalar> keys = k, values = v;
  if (past_k) {
    const Var<Scalar> kk[] = {*past_k, k};
    const Var<Scalar> vv[] = {*past_v, v};
    keys = concat_rows<Scalar>(kk);
    values = concat_rows<Scalar>(vv);
  }
  x = x + matmul(attend(q, keys, values, cfg.dec_heads, bias), p(pre + ".wo"));
  x = x + feed_forward(p, norm(p, x, pre + ".ln2"), pre);
  return {x, k, v};
}

template <typename Scalar>
Var<Scalar> output_head(BoundParameters<Scalar>& p, Var<Scalar> x) {
  return log_softmax_rows(linear(p, norm(p, x, "dec.lnf"), "dec.out"));
}

template <typename Scalar>
Tensor<Scalar> mask_bias(const std::vector<SlotKey>& queries, const std::vector<SlotKey>& keys,
                         const ModelConfig& cfg) {
  Tensor<Scalar> bias(static_cast<Index>(queries.size()), static_cast<Index>(keys.size()));
  for (std::size_t i = 0; i < queries.size(); ++i)
    for (std::size_t j = 0; j < keys.size(); ++j)
      bias(static_cast<Index>(i), static_cast<Index>(j)) =
          mask_allowed(queries[i], keys[j], cfg.context_chunks, cfg.attend_prev_eos) ? Scalar(0)
                                                                                     : static_cast<Scalar>(kMaskBias);
  return bias;
}

}  // namespace

template <typename Scalar>
Var<Scalar> decoder_forward_full(BoundParameters<Scalar>& p, const ModelConfig& cfg, Var<Scalar> encodings,
                                 const InterleavedSequence& seq, std::int64_t first_position) {
  if (seq.size() == 0) throw ShapeError("decoder_forward_full: empty sequence");
  if (encodings.cols() != cfg.enc_dim) throw ShapeError("decoder_forward_full: encoding width mismatch");
  std::vector<int> tokens;
  std::vector<int> gather;
  std::vector<SlotKey> keys;
  std::vector<std::int64_t> pos;
  const Index audio_rows = encodings.rows();
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const Slot& s = seq.slots[i];
    if (s.role == SlotRole::kAudio) {
      if (s.frame < 0 || s.frame >= audio_rows) throw ShapeError("decoder_forward_full: audio slot frame outside encodings");
      gather.push_back(static_cast<int>(s.frame));
    } else {
      if (s.token < 0 || s.token > cfg.text_vocab) throw ShapeError("decoder_forward_full: token id out of range");
      gather.push_back(static_cast<int>(audio_rows) + static_cast<int>(tokens.size()));
      tokens.push_back(s.token);
    }
    const std::int64_t position = first_position + static_cast<std::int64_t>(i);
    keys.push_back({position, s.chunk, s.role});
    pos.push_back(position);
  }
  Var<Scalar> audio = linear(p, encodings, "dec.proj");
  Var<Scalar> x;
  if (tokens.empty()) {
    x = gather_rows(audio, gather);
  } else {
    const Var<Scalar> parts[] = {audio, embedding(p("dec.embed"), tokens)};
    x = gather_rows(concat_rows<Scalar>(parts), gather);
  }
  const Tensor<Scalar> bias = mask_bias<Scalar>(keys, keys, cfg);
  for (int l = 0; l < cfg.dec_layers; ++l) x = decoder_layer<Scalar>(p, cfg, l, x, pos, std::nullopt, std::nullopt, bias).x;
  return output_head(p, x);
}

template Var<float> decoder_forward_full<float>(BoundParameters<float>&, const ModelConfig&, Var<float>,
                                                const InterleavedSequence&, std::int64_t);
template Var<double> decoder_forward_full<double>(BoundParameters<double>&, const ModelConfig&, Var<double>,
                                                  const InterleavedSequence&, std::int64_t);

DecoderCache::DecoderCache(const ModelConfig& cfg, std::int64_t first_position)
    : keys_(static_cast<std::size_t>(cfg.dec_layers), Tensor<float>(0, cfg.dec_dim)),
      values_(static_cast<std::size_t>(cfg.dec_layers), Tensor<float>(0, cfg.dec_dim)),
      next_position_(first_position) {}

std::int64_t DecoderCache::retained_chunks() const {
  if (entries_.empty()) return 0;
  return entries_.back().chunk - entries_.front().chunk + 1;
}

Tensor<float> decoder_step(const Model& model, DecoderCache& cache, const std::vector<StepSlot>& slots) {
  const ModelConfig& cfg = model.config;
  if (slots.empty()) return Tensor<float>(0, cfg.text_vocab + 1);

  // Validate the whole batch against the ordering state machine first.
  std::int64_t chunk = cache.current_chunk_;
  SlotRole last = cache.last_role_;
  for (const auto& s : slots) {
    if (s.chunk < cache.evicted_below_)
      throw StateError("decoder_step: chunk " + std::to_string(s.chunk) + " was evicted");
    if (s.role == SlotRole::kAudio) {
      if (s.encoding.cols() != cfg.enc_dim) throw ShapeError("decoder_step: audio encoding width mismatch");
    } else {
      const bool ok = s.role == SlotRole::kEos ? s.token == cfg.text_vocab : (s.token >= 0 && s.token < cfg.text_vocab);
      if (!ok) throw StateError("decoder_step: token " + std::to_string(s.token) + " does not match slot role");
    }
    if (chunk < 0) {
      if (s.role != SlotRole::kAudio) throw StateError("decoder_step: a session must start with audio");
    } else if (s.chunk == chunk) {
      if (last == SlotRole::kEos) throw StateError("decoder_step: chunk " + std::to_string(chunk) + " already ended with EOS");
      if (s.role == SlotRole::kAudio && last != SlotRole::kAudio)
        throw StateError("decoder_step: audio slot after text in chunk " + std::to_string(chunk));
    } else if (s.chunk == chunk + 1) {
      if (last != SlotRole::kEos || s.role != SlotRole::kAudio)
        throw StateError("decoder_step: chunk " + std::to_string(s.chunk) + " must start with audio after EOS");
    } else {
      throw StateError("decoder_step: out-of-order slot for chunk " + std::to_string(s.chunk) + " (current " +
                       std::to_string(chunk) + ")");
    }
    chunk = s.chunk;
    last = s.role;
  }

  Tape<float> tape(false);
  BoundParameters<float> p(tape, model.params);
  const Index n = static_cast<Index>(slots.size());
  std::vector<SlotKey> new_keys;
  std::vector<std::int64_t> pos;
  std::vector<int> tokens, gather;
  Tensor<float> audio_rows(0, cfg.enc_dim);
  std::vector<Index> audio_idx;
  for (Index i = 0; i < n; ++i) {
    const auto& s = slots[static_cast<std::size_t>(i)];
    const std::int64_t position = cache.next_position_ + i;
    new_keys.push_back({position, s.chunk, s.role});
    pos.push_back(position);
    if (s.role == SlotRole::kAudio) audio_idx.push_back(i);
  }
  audio_rows.resize(static_cast<Index>(audio_idx.size()), cfg.enc_dim);
  for (std::size_t a = 0; a < audio_idx.size(); ++a)
    audio_rows.row(static_cast<Index>(a)) = slots[static_cast<std::size_t>(audio_idx[a])].encoding;
  int audio_seen = 0;
  for (const auto& s : slots) {
    if (s.role == SlotRole::kAudio) {
      gather.push_back(audio_seen++);
    } else {
      gather.push_back(static_cast<int>(audio_idx.size()) + static_cast<int>(tokens.size()));
      tokens.push_back(s.token);
    }
  }
  std::vector<Var<float>> parts;
  if (!audio_idx.empty()) parts.push_back(linear(p, tape.constant(audio_rows), "dec.proj"));
  if (!tokens.empty()) parts.push_back(embedding(p("dec.embed"), tokens));
  Var<float> x = gather_rows(parts.size() == 1 ? parts[0] : concat_rows<float>(parts), gather);

  // Past keys that no query in this batch may see are left out, so a cache
  // holding extra masked history computes exactly what an evicted one does.
  std::vector<Index> visible;
  for (std::size_t j = 0; j < cache.entries_.size(); ++j)
    for (const auto& q : new_keys)
      if (mask_allowed(q, cache.entries_[j], cfg.context_chunks, cfg.attend_prev_eos)) {
        visible.push_back(static_cast<Index>(j));
        break;
      }
  const bool all_visible = visible.size() == cache.entries_.size();
  std::vector<SlotKey> all_keys;
  for (Index j : visible) all_keys.push_back(cache.entries_[static_cast<std::size_t>(j)]);
  all_keys.insert(all_keys.end(), new_keys.begin(), new_keys.end());
  const Tensor<float> bias = mask_bias<float>(new_keys, all_keys, cfg);
  std::vector<Tensor<float>> new_k, new_v;
  for (int l = 0; l < cfg.dec_layers; ++l) {
    std::optional<Var<float>> pk, pv;
    const auto& K = cache.keys_[static_cast<std::size_t>(l)];
    const auto& V = cache.values_[static_cast<std::size_t>(l)];
    if (all_visible && !visible.empty()) {
      pk = tape.constant(K);
      pv = tape.constant(V);
    } else if (!visible.empty()) {
      pk = tape.constant(Tensor<float>(K(visible, Eigen::placeholders::all)));
      pv = tape.constant(Tensor<float>(V(visible, Eigen::placeholders::all)));
    }
    auto out = decoder_layer<float>(p, cfg, l, x, pos, pk, pv, bias);
    x = out.x;
    new_k.push_back(out.k.value());
    new_v.push_back(out.v.value());
  }
  Tensor<float> logp = output_head(p, x).value();

  for (int l = 0; l < cfg.dec_layers; ++l) {
    auto& K = cache.keys_[static_cast<std::size_t>(l)];
    auto& V = cache.values_[static_cast<std::size_t>(l)];
    const Index old = K.rows();
    K.conservativeResize(old + n, Eigen::NoChange);
    V.conservativeResize(old + n, Eigen::NoChange);
    K.bottomRows(n) = new_k[static_cast<std::size_t>(l)];
    V.bottomRows(n) = new_v[static_cast<std::size_t>(l)];
  }
  cache.entries_.insert(cache.entries_.end(), new_keys.begin(), new_keys.end());
  cache.next_position_ += n;
  cache.current_chunk_ = chunk;
  cache.last_role_ = last;
  return logp;
}

void cache_evict(DecoderCache& cache, std::int64_t k, std::int64_t context_chunks) {
  if (context_chunks >= kUnbounded) return;
  const std::int64_t keep_from = k - context_chunks;
  if (keep_from <= cache.evicted_below_) return;
  std::size_t drop = 0;
  while (drop < cache.entries_.size() && cache.entries_[drop].chunk < keep_from) ++drop;
  if (drop > 0) {
    cache.entries_.erase(cache.entries_.begin(), cache.entries_.begin() + static_cast<std::ptrdiff_t>(drop));
    for (auto* set : {&cache.keys_, &cache.values_})
      for (auto& m : *set) {
        Tensor<float> rest = m.bottomRows(m.rows() - static_cast<Index>(drop));
        m = std::move(rest);
      }
  }
  cache.evicted_below_ = keep_from;
}

}  // namespace chunkasr
