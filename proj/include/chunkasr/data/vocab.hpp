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

#include <string>
#include <vector>

namespace chunkasr {

using TokenSeq = std::vector<int>;

/// Token ids are dense from 0: text tokens 0..V-1, then EOS (V), then the
/// CTC blank (V+1). The decoder predicts over text+EOS (V+1 classes, column
/// == id); the CTC head predicts over text+blank (V+1 classes, blank in the
/// last column).
class Vocab {
 public:
  explicit Vocab(int text_size);

  int text_size() const { return text_size_; }
  int size() const { return text_size_ + 2; }
  int eos() const { return text_size_; }
  int blank() const { return text_size_ + 1; }
  bool is_text(int id) const { return id >= 0 && id < text_size_; }

  int decoder_classes() const { return text_size_ + 1; }
  int ctc_classes() const { return text_size_ + 1; }
  int ctc_blank_column() const { return text_size_; }

  std::string name(int id) const;

 private:
  int text_size_;
};

/// Removes EOS markers, keeping text tokens in order.
TokenSeq strip_eos(const TokenSeq& tokens, const Vocab& vocab);

}  // namespace chunkasr
