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

#include "chunkasr/data/vocab.hpp"

#include "chunkasr/errors.hpp"

namespace chunkasr {

Vocab::Vocab(int text_size) : text_size_(text_size) {
  if (text_size < 1) throw ConfigError("vocab: text vocabulary must have at least one token");
}

std::string Vocab::name(int id) const {
  if (id == eos()) return "$";
  if (id == blank()) return "<b>";
  return std::to_string(id);
}

TokenSeq strip_eos(const TokenSeq& tokens, const Vocab& vocab) {
  TokenSeq out;
  for (int t : tokens)
    if (vocab.is_text(t)) out.push_back(t);
  return out;
}

}  // namespace chunkasr
