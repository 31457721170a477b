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

#include "chunkasr/model/config.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "chunkasr/errors.hpp"

namespace chunkasr {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string format_count(std::int64_t v) { return v >= kUnbounded ? "inf" : std::to_string(v); }

std::int64_t parse_count(const std::string& s) {
  std::string low = s;
  std::transform(low.begin(), low.end(), low.begin(), [](unsigned char c) { return std::tolower(c); });
  if (low == "inf" || low == "infinity" || low == "unbounded") return kUnbounded;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0)
    throw ConfigError("expected a non-negative integer or 'inf', got '" + s + "'");
  return v;
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("model config: " + field + " " + why);
  };
  if (text_vocab < 1) fail("text_vocab", "must be >= 1");
  if (input_dim < 1) fail("input_dim", "must be >= 1");
  if (enc_layers < 1) fail("enc_layers", "must be >= 1");
  if (dec_layers < 1) fail("dec_layers", "must be >= 1");
  if (enc_heads < 1 || enc_dim % enc_heads != 0) fail("enc_heads", "must divide enc_dim");
  if (dec_heads < 1 || dec_dim % dec_heads != 0) fail("dec_heads", "must divide dec_dim");
  if ((enc_dim / enc_heads) % 2 != 0) fail("enc_dim", "per-head width must be even (rotary pairs)");
  if ((dec_dim / dec_heads) % 2 != 0) fail("dec_dim", "per-head width must be even (rotary pairs)");
  if (enc_ffn < 1) fail("enc_ffn", "must be >= 1");
  if (dec_ffn < 1) fail("dec_ffn", "must be >= 1");
  if (enc_left_chunks < 0) fail("enc_left_chunks", "must be >= 0");
  if (lookahead < 0) fail("lookahead", "must be >= 0");
  if (chunk_frames < 1) fail("chunk_frames", "must be >= 1");
  if (context_chunks < 0) fail("context_chunks", "must be >= 0");
  if (max_tokens_per_chunk < 0) fail("max_tokens_per_chunk", "must be >= 0");
  if (!(rope_base > 1)) fail("rope_base", "must be > 1");
}

std::uint64_t ModelConfig::architecture_hash() const {
  std::ostringstream ss;
  ss << text_vocab << '|' << input_dim << '|' << enc_layers << '|' << enc_heads << '|' << enc_dim << '|' << enc_ffn
     << '|' << dec_layers << '|' << dec_heads << '|' << dec_dim << '|' << dec_ffn;
  return fnv1a(ss.str());
}

std::string ModelConfig::to_text() const {
  std::ostringstream ss;
  ss.precision(17);
  ss << "text_vocab=" << text_vocab << '\n'
     << "input_dim=" << input_dim << '\n'
     << "enc_layers=" << enc_layers << '\n'
     << "enc_heads=" << enc_heads << '\n'
     << "enc_dim=" << enc_dim << '\n'
     << "enc_ffn=" << enc_ffn << '\n'
     << "enc_left_chunks=" << format_count(enc_left_chunks) << '\n'
     << "lookahead=" << lookahead << '\n'
     << "dec_layers=" << dec_layers << '\n'
     << "dec_heads=" << dec_heads << '\n'
     << "dec_dim=" << dec_dim << '\n'
     << "dec_ffn=" << dec_ffn << '\n'
     << "chunk_frames=" << format_count(chunk_frames) << '\n'
     << "context_chunks=" << format_count(context_chunks) << '\n'
     << "attend_prev_eos=" << (attend_prev_eos ? "true" : "false") << '\n'
     << "max_tokens_per_chunk=" << max_tokens_per_chunk << '\n'
     << "rope_base=" << rope_base << '\n';
  return ss.str();
}

ModelConfig ModelConfig::from_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("model config: malformed line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  ModelConfig c;
  auto take = [&](const char* key, auto& field) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    using T = std::decay_t<decltype(field)>;
    if constexpr (std::is_same_v<T, bool>) {
      field = it->second == "true" || it->second == "1";
    } else if constexpr (std::is_same_v<T, double>) {
      field = std::stod(it->second);
    } else {
      field = static_cast<T>(parse_count(it->second));
    }
    kv.erase(it);
  };
  take("text_vocab", c.text_vocab);
  take("input_dim", c.input_dim);
  take("enc_layers", c.enc_layers);
  take("enc_heads", c.enc_heads);
  take("enc_dim", c.enc_dim);
  take("enc_ffn", c.enc_ffn);
  take("enc_left_chunks", c.enc_left_chunks);
  take("lookahead", c.lookahead);
  take("dec_layers", c.dec_layers);
  take("dec_heads", c.dec_heads);
  take("dec_dim", c.dec_dim);
  take("dec_ffn", c.dec_ffn);
  take("chunk_frames", c.chunk_frames);
  take("context_chunks", c.context_chunks);
  take("attend_prev_eos", c.attend_prev_eos);
  take("max_tokens_per_chunk", c.max_tokens_per_chunk);
  take("rope_base", c.rope_base);
  if (!kv.empty()) throw ConfigError("model config: unknown key '" + kv.begin()->first + "'");
  c.validate();
  return c;
}

}  // namespace chunkasr
