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

#include <filesystem>
#include <string>
#include <vector>

#include "chunkasr/data/synth.hpp"

namespace chunkasr {

// Dataset file, little-endian:
//   magic "CADS" | u32 version (=1) | u32 feature_dim | u64 count
//   per utterance:
//     u32 frames | u32 tokens | u8 has_ref
//     f32[frames * feature_dim] features (row-major)
//     i32[tokens] transcript
//     i64[tokens] ref_end_frames   (only if has_ref)

std::string encode_dataset(const std::vector<Utterance>& utts);
/// Throws FormatError with the byte offset of the first malformed field.
std::vector<Utterance> decode_dataset(const std::string& bytes);

void save_dataset(const std::filesystem::path& path, const std::vector<Utterance>& utts);
std::vector<Utterance> load_dataset(const std::filesystem::path& path);

}  // namespace chunkasr
