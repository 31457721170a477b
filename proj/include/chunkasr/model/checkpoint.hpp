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
#include <map>
#include <optional>
#include <string>

#include "chunkasr/model/params.hpp"

namespace chunkasr {

/// Optimizer state carried by a checkpoint for resuming.
struct OptimizerState {
  std::int64_t step = 0;
  ParameterSet<float> first;
  ParameterSet<float> second;
  bool operator==(const OptimizerState&) const = default;
};

/// Model plus training progress.
///
/// Layout (little-endian): "CACK" | u32 version | str config | u64 arch hash
/// | i64 step | u32 n_meta | (str key, str value)* | u32 n | (str name, u32
/// rows, u32 cols, f32 data)* | u8 has_opt | [i64 opt step, tensors(m),
/// tensors(v)]. Strings are u32 length + bytes.
struct Checkpoint {
  Model model;
  std::int64_t step = 0;
  std::map<std::string, std::string> meta;
  std::optional<OptimizerState> optimizer;
};

std::string encode_checkpoint(const Checkpoint& ckpt);
/// Throws FormatError (with byte offset) on malformed input and
/// ConfigError when the stored hash does not match the stored config.
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

/// Throws ConfigError naming both hashes when `expected` and the checkpoint
/// architecture differ.
void require_compatible(const ModelConfig& expected, const ModelConfig& stored);

}  // namespace chunkasr
