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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chunkasr/data/synth.hpp"
#include "chunkasr/evalbench/wer.hpp"
#include "chunkasr/search/session.hpp"
#include "chunkasr/train/trainer.hpp"

namespace chunkasr {

/// Rows of a report, rendered as an aligned text table or as JSON lines.
struct ReportTable {
  std::vector<std::string> columns;
  std::vector<nlohmann::json> rows;  // objects keyed by column

  std::string to_text() const;
  /// One JSON object per row, each carrying `config` under "config".
  std::string to_jsonl(const nlohmann::json& config = nlohmann::json::object()) const;
};

struct DecodeOptions {
  int beam = 4;
  int threads = 1;
};

/// Decodes every example with a streaming session.
struct CorpusDecode {
  CorpusWer wer;
  std::vector<SessionResult> results;
  std::int64_t max_retained_chunks = 0;
  std::int64_t max_chunks = 0;
};

CorpusDecode decode_corpus(const Model& model, const std::vector<TrainExample>& data, const DecodeOptions& opts);

struct ConcatRow {
  int multiplier = 1;
  CorpusDecode decode;
};

/// Repeats each utterance n times (features and transcript, `gap_frames`
/// zero encoder frames between copies) and decodes the result.
std::vector<ConcatRow> concat_eval(const Model& model, const std::vector<Utterance>& corpus,
                                   const std::vector<int>& multipliers, const DecodeOptions& opts,
                                   int gap_frames = 0, int stride = kDefaultStride);

ReportTable concat_table(const std::vector<ConcatRow>& rows);

struct AblationCell {
  std::int64_t chunk_frames = 0;
  std::int64_t context_chunks = 0;
  CorpusWer wer;
  double marginal_pairs_per_token = 0.0;
};

/// Produces a model for a training configuration (train or load).
using ModelSource = std::function<Model(const TrainConfig&)>;

/// One trained model per (c, b) cell, evaluated on `dev`. Cells are ordered
/// chunk-major. The default source runs train_loop and takes its best
/// checkpoint.
std::vector<AblationCell> ablation_grid(const std::vector<TrainExample>& train, const std::vector<TrainExample>& dev,
                                        const TrainConfig& base, const std::vector<std::int64_t>& chunk_sizes,
                                        const std::vector<std::int64_t>& context_sizes, const DecodeOptions& opts,
                                        const ModelSource& source = {});

ReportTable ablation_table(const std::vector<AblationCell>& cells);

/// Runs `fn(i)` for i in [0, n) on up to `threads` threads.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace chunkasr
