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

#include "chunkasr/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "chunkasr/ctcalign/align.hpp"
#include "chunkasr/ctcalign/ctc.hpp"
#include "chunkasr/errors.hpp"
#include "chunkasr/evalbench/wer.hpp"
#include "chunkasr/model/encoder.hpp"
#include "chunkasr/numcore/adam.hpp"
#include "chunkasr/search/session.hpp"

namespace chunkasr {

const char* to_string(AlignSource s) { return s == AlignSource::kReference ? "reference" : "ctc"; }

AlignSource parse_align_source(const std::string& s) {
  if (s == "reference") return AlignSource::kReference;
  if (s == "ctc") return AlignSource::kCtc;
  throw ConfigError("align_source must be 'reference' or 'ctc', got '" + s + "'");
}

void TrainConfig::validate() const {
  model.validate();
  if (pretrain_epochs < 0) throw ConfigError("pretrain_epochs must be >= 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(ctc_weight >= 0.0)) throw ConfigError("ctc_weight must be >= 0");
  if (warmup_fraction < 0 || hold_fraction < 0 || warmup_fraction + hold_fraction > 1)
    throw ConfigError("warmup_fraction + hold_fraction must lie in [0, 1]");
  if (!(clip_norm >= 0.0)) throw ConfigError("clip_norm must be >= 0");
  TriStageSchedule::spanning(1, peak_lr, floor_lr).validate();
}

std::vector<TrainExample> make_examples(const std::vector<Utterance>& utts, int stride) {
  std::vector<TrainExample> out;
  out.reserve(utts.size());
  for (const Utterance& u : utts) out.push_back({stack_frames(u.features, stride), u.transcript, u.ref_end_frames});
  return out;
}

std::string StepRecord::format() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "step %lld lr %.6e ce %.6f ctc %.6f total %.6f", static_cast<long long>(step), lr,
                loss.ce, loss.ctc, loss.total);
  return buf;
}

std::vector<std::int64_t> ctc_end_frames(const Model& model, const TrainExample& ex) {
  Tape<float> tape(false);
  BoundParameters<float> bp(tape, model.params);
  const auto enc = encoder_forward(bp, model.config, ex.frames);
  return ctc_forced_align(enc.ctc_logprobs.value(), ex.transcript, model.config.text_vocab).end_frames;
}

SegmentedTranscript segment_example(const Model& model, const TrainExample& ex, AlignSource source) {
  const ChunkPlan plan = chunk_plan(ex.frames.rows(), model.config.chunk_frames);
  if (source == AlignSource::kReference) {
    if (!ex.ref_end_frames) throw InfeasibleError("example has no reference end frames");
    return segment_transcript(ex.transcript, *ex.ref_end_frames, plan);
  }
  return segment_transcript(ex.transcript, ctc_end_frames(model, ex), plan);
}

double greedy_wer(const Model& model, const std::vector<TrainExample>& data) {
  std::vector<TokenSeq> refs, hyps;
  for (const TrainExample& ex : data) {
    refs.push_back(ex.transcript);
    hyps.push_back(greedy_decode(model, ex.frames).transcript);
  }
  return corpus_wer(refs, hyps).all.wer();
}

LossBreakdown evaluate_loss(const Model& model, const std::vector<TrainExample>& data, double ctc_weight,
                            AlignSource source) {
  std::vector<SegmentedTranscript> segs;
  segs.reserve(data.size());
  for (const TrainExample& ex : data) segs.push_back(segment_example(model, ex, source));
  std::vector<TrainItem<float>> items;
  for (std::size_t i = 0; i < data.size(); ++i) items.push_back({&data[i].frames, &data[i].transcript, &segs[i]});
  Tape<float> tape(false);
  BoundParameters<float> bp(tape, model.params);
  return total_loss(bp, model.config, items, ctc_weight).breakdown;
}

namespace {

void clip_gradients(ParameterSet<float>& grads, double max_norm) {
  if (max_norm <= 0.0) return;
  double sq = 0.0;
  for (const auto& [name, g] : grads) sq += g.template cast<double>().squaredNorm();
  const double norm = std::sqrt(sq);
  if (!(norm > max_norm)) return;
  const auto s = static_cast<float>(max_norm / norm);
  for (auto& [name, g] : grads) g *= s;
}

Checkpoint snapshot(const Model& model, std::int64_t step, const Adam<float>& adam, int epoch, double dev_wer,
                    int best_epoch, double best_wer) {
  Checkpoint c;
  c.model = model;
  c.step = step;
  c.meta["epoch"] = std::to_string(epoch);
  c.meta["dev_wer"] = std::to_string(dev_wer);
  c.meta["best_epoch"] = std::to_string(best_epoch);
  c.meta["best_dev_wer"] = std::to_string(best_wer);
  c.optimizer = OptimizerState{adam.step_count(), adam.first_moments(), adam.second_moments()};
  return c;
}

std::string meta_or(const Checkpoint& c, const std::string& key, const std::string& fallback) {
  auto it = c.meta.find(key);
  return it == c.meta.end() ? fallback : it->second;
}

}  // namespace

TrainResult train_loop(const std::vector<TrainExample>& train, const std::vector<TrainExample>& dev,
                       const TrainConfig& cfg, const Checkpoint* resume,
                       const std::function<void(const StepRecord&)>& on_step) {
  cfg.validate();
  if (train.empty()) throw ShapeError("train_loop: empty training set");
  for (const TrainExample& ex : train)
    if (ex.frames.cols() != cfg.model.input_dim) throw ShapeError("train_loop: feature width does not match model");

  TrainResult result;
  Model model = init_model(cfg.model, cfg.seed);
  Adam<float> adam;
  std::int64_t step = 0;
  int first_epoch = 0;
  if (resume) {
    require_compatible(cfg.model, resume->model.config);
    model.params = resume->model.params;
    step = resume->step;
    if (resume->optimizer) adam.restore(resume->optimizer->step, resume->optimizer->first, resume->optimizer->second);
    first_epoch = std::stoi(meta_or(*resume, "epoch", "-1")) + 1;
    result.best_epoch = std::stoi(meta_or(*resume, "best_epoch", "-1"));
    result.best_dev_wer = std::stod(meta_or(*resume, "best_dev_wer", "-1"));
    result.best = *resume;
    if (!cfg.checkpoint_dir.empty() && std::filesystem::exists(cfg.checkpoint_dir + "/best.ckpt"))
      result.best = load_checkpoint(cfg.checkpoint_dir + "/best.ckpt");
  } else {
    result.best = snapshot(model, 0, adam, -1, -1.0, -1, -1.0);
  }
  result.last = result.best;
  if (resume) result.last = *resume;
  if (!cfg.checkpoint_dir.empty()) std::filesystem::create_directories(cfg.checkpoint_dir);

  const std::int64_t batches =
      (static_cast<std::int64_t>(train.size()) + cfg.batch_size - 1) / cfg.batch_size;
  const TriStageSchedule schedule = TriStageSchedule::spanning(batches * cfg.total_epochs(), cfg.peak_lr,
                                                               cfg.floor_lr, cfg.warmup_fraction, cfg.hold_fraction);

  for (int epoch = first_epoch; epoch < cfg.total_epochs(); ++epoch) {
    const bool joint = epoch >= cfg.pretrain_epochs;
    EpochRecord rec;
    rec.epoch = epoch;
    rec.joint = joint;

    std::vector<SegmentedTranscript> segs(train.size());
    std::vector<bool> usable(train.size(), true);
    if (joint)
      for (std::size_t i = 0; i < train.size(); ++i) {
        try {
          segs[i] = segment_example(model, train[i], cfg.align_source);
        } catch (const InfeasibleError&) {
          usable[i] = false;
          ++rec.align_failures;
        }
      }

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < train.size(); ++i)
      if (usable[i]) order.push_back(i);
    std::seed_seq seq{cfg.seed, static_cast<std::uint64_t>(epoch)};
    std::mt19937_64 rng(seq);
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    int loss_count = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      std::vector<TrainItem<float>> items;
      for (std::size_t j = start; j < std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size)); ++j) {
        const std::size_t i = order[j];
        items.push_back({&train[i].frames, &train[i].transcript, joint ? &segs[i] : nullptr});
      }
      Tape<float> tape(true);
      BoundParameters<float> bp(tape, model.params);
      LossGraph<float> g;
      try {
        g = total_loss(bp, model.config, items, cfg.ctc_weight, joint);
      } catch (const InfeasibleError&) {
        continue;
      }
      rec.ctc_infeasible += g.breakdown.infeasible.size();
      StepRecord sr{step, epoch, lr_at(schedule, step), g.breakdown};
      bool ok = std::isfinite(g.breakdown.total);
      if (ok) {
        tape.backward(g.total);
        ParameterSet<float> grads = bp.gradients();
        clip_gradients(grads, cfg.clip_norm);
        try {
          adam.step(model.params, grads, sr.lr);
        } catch (const NumericalError& e) {
          ok = false;
          result.divergence = e.what();
        }
      } else {
        result.divergence = "non-finite loss at step " + std::to_string(step);
      }
      result.log.push_back(sr);
      if (on_step) on_step(sr);
      if (!ok) {
        result.diverged = true;
        result.epochs.push_back(rec);
        return result;
      }
      loss_sum += g.breakdown.total;
      ++loss_count;
      ++step;
    }

    rec.step = step;
    rec.train_loss = loss_count ? loss_sum / loss_count : 0.0;
    if (joint && !dev.empty()) rec.dev_wer = greedy_wer(model, dev);
    const bool better = joint && (dev.empty() || result.best_epoch < 0 || rec.dev_wer < result.best_dev_wer);
    if (better) {
      result.best_epoch = epoch;
      result.best_dev_wer = rec.dev_wer;
    }
    result.last = snapshot(model, step, adam, epoch, rec.dev_wer, result.best_epoch, result.best_dev_wer);
    if (better) result.best = result.last;
    if (!cfg.checkpoint_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof name, "/epoch_%03d.ckpt", epoch);
      save_checkpoint(cfg.checkpoint_dir + name, result.last);
      save_checkpoint(cfg.checkpoint_dir + "/last.ckpt", result.last);
      if (better) save_checkpoint(cfg.checkpoint_dir + "/best.ckpt", result.best);
    }
    result.epochs.push_back(rec);
  }
  return result;
}

}  // namespace chunkasr
