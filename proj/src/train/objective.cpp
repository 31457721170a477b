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

#include "chunkasr/train/objective.hpp"

#include "chunkasr/ctcalign/ctc.hpp"
#include "chunkasr/errors.hpp"
#include "chunkasr/model/decoder.hpp"
#include "chunkasr/model/encoder.hpp"
#include "chunkasr/numcore/ops.hpp"

namespace chunkasr {

SlotTargets build_targets(const InterleavedSequence& seq) {
  SlotTargets t;
  t.targets.assign(seq.size(), -1);
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    const Slot& next = seq.slots[i + 1];
    if (next.role == SlotRole::kAudio) continue;
    t.targets[i] = next.token;
    ++t.counted;
  }
  return t;
}

template <typename Scalar>
LossGraph<Scalar> total_loss(BoundParameters<Scalar>& p, const ModelConfig& cfg,
                             const std::vector<TrainItem<Scalar>>& batch, double ctc_weight, bool decoder) {
  LossGraph<Scalar> out;
  LossBreakdown& br = out.breakdown;
  std::vector<Var<Scalar>> ce_terms, ctc_terms;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const TrainItem<Scalar>& item = batch[i];
    const auto enc = encoder_forward(p, cfg, *item.frames);
    if (ctc_feasible(item.frames->rows(), *item.transcript)) {
      ctc_terms.push_back(ctc_loss(enc.ctc_logprobs, *item.transcript, cfg.text_vocab));
      br.ctc_tokens += std::max<std::size_t>(item.transcript->size(), 1);
    } else {
      br.infeasible.push_back(i);
    }
    if (!decoder) continue;
    if (item.segmentation == nullptr) throw ShapeError("total_loss: batch element without segmentation");
    const ChunkPlan plan = chunk_plan(item.frames->rows(), cfg.chunk_frames);
    const InterleavedSequence seq = interleave(plan, *item.segmentation, cfg.text_vocab);
    const SlotTargets targets = build_targets(seq);
    ce_terms.push_back(nll_gather(decoder_forward_full(p, cfg, enc.encodings, seq), targets.targets));
    br.counted_slots += targets.counted;
  }
  auto sum = [](const std::vector<Var<Scalar>>& terms) {
    Var<Scalar> s = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i) s = s + terms[i];
    return s;
  };
  Var<Scalar> ctc, ce;
  if (!ctc_terms.empty()) {
    ctc = sum(ctc_terms) * static_cast<Scalar>(1.0 / static_cast<double>(br.ctc_tokens));
    br.ctc = static_cast<double>(ctc.value()(0, 0));
  }
  if (decoder) {
    if (ce_terms.empty() || br.counted_slots == 0) throw InfeasibleError("total_loss: empty batch");
    ce = sum(ce_terms) * static_cast<Scalar>(1.0 / static_cast<double>(br.counted_slots));
    br.ce = static_cast<double>(ce.value()(0, 0));
    out.total = ctc_terms.empty() ? ce : ce + ctc * static_cast<Scalar>(ctc_weight);
  } else {
    if (ctc_terms.empty()) throw InfeasibleError("total_loss: no feasible CTC element in batch");
    out.total = ctc;
  }
  br.total = static_cast<double>(out.total.value()(0, 0));
  return out;
}

template LossGraph<float> total_loss<float>(BoundParameters<float>&, const ModelConfig&,
                                            const std::vector<TrainItem<float>>&, double, bool);
template LossGraph<double> total_loss<double>(BoundParameters<double>&, const ModelConfig&,
                                              const std::vector<TrainItem<double>>&, double, bool);

}  // namespace chunkasr
