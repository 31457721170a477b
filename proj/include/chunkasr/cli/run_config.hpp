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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chunkasr/data/synth.hpp"
#include "chunkasr/train/trainer.hpp"

namespace chunkasr {

/// Everything a command needs, loaded from a sectioned key=value file.
/// Command-line flags override fields; the resolved config is written next
/// to every output so a run can be repeated from it alone.
struct RunConfig {
  TrainConfig train;  // [model] and [train]
  SyntheticSpec synth;  // [data]
  std::string data_dir = "data";
  int train_count = 2000;
  int dev_count = 100;
  int test_count = 200;

  std::string out_dir = "run";  // [run]

  int beam = 4;  // [decode]
  int threads = 1;
  std::string split = "test";
  std::string checkpoint;  // empty: <out_dir>/best.ckpt
  bool emit_trace = false;

  std::vector<int> concat = {1, 2, 10};  // [eval]
  int gap_frames = 0;

  std::vector<std::int64_t> ablate_chunks = {4, 8, 16};  // [ablate]
  std::vector<std::int64_t> ablate_contexts = {0, 1, 2, kUnbounded};

  std::vector<int> bench_lengths = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};  // [bench]
  std::vector<std::int64_t> bench_contexts = {2, kUnbounded};
  std::int64_t bench_frames = 64;
  std::int64_t bench_tokens = 24;
  bool wall_clock = false;

  /// Cross-field checks; throws ConfigError listing every problem.
  void validate() const;

  std::string checkpoint_path() const { return checkpoint.empty() ? out_dir + "/best.ckpt" : checkpoint; }

  std::string to_ini() const;
  nlohmann::json to_json() const;

  /// Parses INI text. Unknown sections or keys and malformed values are
  /// all reported in one ConfigError.
  static RunConfig from_ini(const std::string& text);
  static RunConfig load(const std::string& path);

  /// Sets one field by "section.key"; throws ConfigError on unknown names.
  void set(const std::string& dotted_key, const std::string& value);

  /// "section.key = default  # doc" for every field.
  static std::string documented_defaults();
};

std::vector<std::int64_t> parse_count_list(const std::string& s);
std::string format_count_list(const std::vector<std::int64_t>& v);

}  // namespace chunkasr
