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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chunkasr/data/synth.hpp"
#include "chunkasr/model/checkpoint.hpp"
#include "chunkasr/train/objective.hpp"
#include "chunkasr/train/schedule.hpp"

namespace chunkasr {

/// Where per-chunk token segmentation comes from during joint training.
enum class AlignSource { kReference, kCtc };

const char* to_string(AlignSource s);
AlignSource parse_align_source(const std::string& s);

struct TrainConfig {
  ModelConfig model;
  int pretrain_epochs = 2;  // encoder-only CTC epochs before joint training
  int epochs = 10;          // joint epochs
  int batch_size = 8;
  double ctc_weight = 0.5;
  double peak_lr = 3e-3;
  double floor_lr = 1.5e-4;
  double warmup_fraction = 0.1;
  double hold_fraction = 0.4;
  double clip_norm = 5.0;  // global gradient norm clip, 0 disables
  AlignSource align_source = AlignSource::kReference;
  std::uint64_t seed = 1;
  std::string checkpoint_dir;  // empty: checkpoints stay in memory

  void validate() const;
  int total_epochs() const { return pretrain_epochs + epochs; }
};

/// Stacked-frame training example.
struct TrainExample {
  FrameMatrix frames;
  TokenSeq transcript;
  std::optional<std::vector<std::int64_t>> ref_end_frames;
};

std::vector<TrainExample> make_examples(const std::vector<Utterance>& utts, int stride = kDefaultStride);

struct StepRecord {
  std::int64_t step = 0;
  int epoch = 0;
  double lr = 0.0;
  LossBreakdown loss;
  /// "step N lr X ce X ctc X total X"
  std::string format() const;
};

struct EpochRecord {
  int epoch = 0;
  bool joint = true;
  std::int64_t step = 0;
  double train_loss = 0.0;
  double dev_wer = -1.0;  // greedy dev WER, joint epochs only
  std::size_t align_failures = 0;
  std::size_t ctc_infeasible = 0;
};

struct TrainResult {
  Checkpoint best;
  Checkpoint last;
  int best_epoch = -1;
  double best_dev_wer = -1.0;
  std::vector<StepRecord> log;
  std::vector<EpochRecord> epochs;
  bool diverged = false;
  std::string divergence;
};

/// Segmentation of one example: reference end frames, or forced alignment
/// with the model's CTC head. Throws InfeasibleError when neither works.
SegmentedTranscript segment_example(const Model& model, const TrainExample& ex, AlignSource source);

/// Token end frames from CTC forced alignment with the model's encoder.
std::vector<std::int64_t> ctc_end_frames(const Model& model, const TrainExample& ex);

/// Corpus greedy WER of the model on `data`.
double greedy_wer(const Model& model, const std::vector<TrainExample>& data);

/// Forward-only objective over `data` with the given segmentation source.
LossBreakdown evaluate_loss(const Model& model, const std::vector<TrainExample>& data, double ctc_weight,
                            AlignSource source);

/// Optional encoder-only CTC stage, then joint training. Segmentations are
/// refreshed at every joint epoch start. Each epoch ends with a checkpoint;
/// the best one by greedy dev WER is returned. A non-finite loss or
/// gradient stops training and returns the last good checkpoint. With
/// `resume`, training continues after the checkpoint's epoch with its step
/// counter and optimizer state.
TrainResult train_loop(const std::vector<TrainExample>& train, const std::vector<TrainExample>& dev,
                       const TrainConfig& cfg, const Checkpoint* resume = nullptr,
                       const std::function<void(const StepRecord&)>& on_step = {});

}  // namespace chunkasr
