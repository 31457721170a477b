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

#include "chunkasr/model/encoder.hpp"

#include <algorithm>

#include "chunkasr/errors.hpp"
#include "chunkasr/model/layers.hpp"

namespace chunkasr {

template <typename Scalar>
EncoderOutput<Scalar> encoder_forward(BoundParameters<Scalar>& p, const ModelConfig& cfg,
                                      const Tensor<Scalar>& features, std::int64_t first_frame) {
  if (features.rows() < 1) throw ShapeError("encoder_forward: no frames");
  if (features.cols() != cfg.input_dim)
    throw ShapeError("encoder_forward: feature width " + std::to_string(features.cols()) + ", model expects " +
                     std::to_string(cfg.input_dim));
  const std::int64_t c = cfg.chunk_frames;
  if (first_frame % c != 0) throw ShapeError("encoder_forward: first_frame is not a chunk boundary");

  const Index T = features.rows();
  const int hd = cfg.enc_dim / cfg.enc_heads;
  const std::int64_t left = cfg.enc_left_chunks;
  std::vector<std::int64_t> pos(static_cast<std::size_t>(T)), chunk(static_cast<std::size_t>(T));
  for (Index t = 0; t < T; ++t) {
    pos[static_cast<std::size_t>(t)] = first_frame + t;
    chunk[static_cast<std::size_t>(t)] = (first_frame + t) / c;
  }
  const auto bias_val = static_cast<Scalar>(kMaskBias);
  Tensor<Scalar> block_bias(T, T);
  for (Index t = 0; t < T; ++t)
    for (Index s = 0; s < T; ++s) {
      const auto kt = chunk[static_cast<std::size_t>(t)], ks = chunk[static_cast<std::size_t>(s)];
      const bool ok = ks <= kt && (left >= kUnbounded || ks >= kt - left);
      block_bias(t, s) = ok ? Scalar(0) : bias_val;
    }
  // Lookahead keys: frame s (shallow stream) is visible to t iff
  // end(chunk(t)) <= s <= t + lookahead.
  Tensor<Scalar> look_bias(T, T);
  bool any_lookahead = false;
  for (Index t = 0; t < T; ++t) {
    const std::int64_t chunk_end = (chunk[static_cast<std::size_t>(t)] + 1) * c;
    for (Index s = 0; s < T; ++s) {
      const std::int64_t gs = first_frame + s;
      const bool ok = gs >= chunk_end && gs <= first_frame + t + cfg.lookahead;
      look_bias(t, s) = ok ? Scalar(0) : bias_val;
      any_lookahead = any_lookahead || ok;
    }
  }

  auto& tape = p.tape();
  const Var<Scalar> input = tape.constant(features);
  const Var<Scalar> shallow = linear(p, input, "enc.in");
  Var<Scalar> h = shallow;
  for (int l = 0; l < cfg.enc_layers; ++l) {
    const std::string pre = "enc.l" + std::to_string(l);
    auto a = norm(p, h, pre + ".ln1");
    auto q = rotary(matmul(a, p(pre + ".wq")), pos, hd, cfg.rope_base);
    auto k = rotary(matmul(a, p(pre + ".wk")), pos, hd, cfg.rope_base);
    auto v = matmul(a, p(pre + ".wv"));
    Var<Scalar> ctx;
    if (l == cfg.enc_layers - 1 && any_lookahead) {
      auto as = norm(p, shallow, pre + ".ln1");
      auto ks = rotary(matmul(as, p(pre + ".wk")), pos, hd, cfg.rope_base);
      auto vs = matmul(as, p(pre + ".wv"));
      Tensor<Scalar> bias(T, 2 * T);
      bias << block_bias, look_bias;
      const Var<Scalar> kk[] = {k, ks};
      const Var<Scalar> vv[] = {v, vs};
      ctx = attend(q, concat_rows<Scalar>(kk), concat_rows<Scalar>(vv), cfg.enc_heads, bias);
    } else {
      ctx = attend(q, k, v, cfg.enc_heads, block_bias);
    }
    h = h + matmul(ctx, p(pre + ".wo"));
    h = h + feed_forward(p, norm(p, h, pre + ".ln2"), pre);
  }
  EncoderOutput<Scalar> out;
  out.encodings = norm(p, h, "enc.lnf");
  out.ctc_logprobs = log_softmax_rows(linear(p, out.encodings, "ctc"));
  return out;
}

template EncoderOutput<float> encoder_forward<float>(BoundParameters<float>&, const ModelConfig&,
                                                     const Tensor<float>&, std::int64_t);
template EncoderOutput<double> encoder_forward<double>(BoundParameters<double>&, const ModelConfig&,
                                                       const Tensor<double>&, std::int64_t);

StreamingEncoder::StreamingEncoder(const Model& model) : model_(model), frames_(0, model.config.input_dim) {}

void StreamingEncoder::push(const FrameMatrix& stacked) {
  if (stacked.cols() != model_.config.input_dim)
    throw ShapeError("streaming encoder: feature width " + std::to_string(stacked.cols()) + ", model expects " +
                     std::to_string(model_.config.input_dim));
  FrameMatrix grown(frames_.rows() + stacked.rows(), frames_.cols());
  grown << frames_, stacked;
  frames_ = std::move(grown);
}

bool StreamingEncoder::ready(std::int64_t k, bool input_finished) const {
  const std::int64_t c = model_.config.chunk_frames;
  const std::int64_t begin = k * c;
  if (begin >= frames_.rows()) return false;
  if (input_finished) return true;
  return (k + 1) * c + model_.config.lookahead <= frames_.rows();
}

std::pair<Tensor<float>, Tensor<float>> StreamingEncoder::encode_chunk(std::int64_t k) const {
  const ModelConfig& cfg = model_.config;
  const std::int64_t c = cfg.chunk_frames;
  const std::int64_t avail = frames_.rows();
  const std::int64_t begin = k * c;
  if (begin >= avail) throw StateError("streaming encoder: chunk " + std::to_string(k) + " has no frames yet");
  const std::int64_t end = std::min(c >= kUnbounded ? avail : begin + c, avail);
  std::int64_t first_chunk = 0;
  if (cfg.enc_left_chunks < kUnbounded) first_chunk = std::max<std::int64_t>(0, k - cfg.enc_layers * cfg.enc_left_chunks);
  const std::int64_t ws = first_chunk * c;
  const std::int64_t we = std::min(end + cfg.lookahead, avail);

  Tape<float> tape(false);
  BoundParameters<float> bp(tape, model_.params);
  const Tensor<float> window = frames_.middleRows(ws, we - ws);
  auto out = encoder_forward(bp, cfg, window, ws);
  return {out.encodings.value().middleRows(begin - ws, end - begin),
          out.ctc_logprobs.value().middleRows(begin - ws, end - begin)};
}

}  // namespace chunkasr
