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

#include "chunkasr/model/checkpoint.hpp"

#include <sstream>

#include "chunkasr/data/binary_io.hpp"
#include "chunkasr/errors.hpp"

namespace chunkasr {

namespace {

constexpr char kMagic[4] = {'C', 'A', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void put_tensors(binary::Writer& w, const ParameterSet<float>& set) {
  w.put<std::uint32_t>(static_cast<std::uint32_t>(set.size()));
  for (const auto& [name, t] : set) {
    w.put_string(name);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(t.rows()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(t.cols()));
    w.put_bytes(t.data(), sizeof(float) * static_cast<std::size_t>(t.size()));
  }
}

ParameterSet<float> get_tensors(binary::Reader& r) {
  ParameterSet<float> set;
  const auto n = r.get<std::uint32_t>("tensor count");
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint64_t at = r.offset();
    std::string name = r.get_string("tensor name");
    const auto rows = r.get<std::uint32_t>("tensor rows");
    const auto cols = r.get<std::uint32_t>("tensor cols");
    const std::uint64_t bytes = std::uint64_t{rows} * cols * sizeof(float);
    if (bytes > r.remaining()) r.fail("truncated tensor '" + name + "'", r.offset());
    Tensor<float> t(rows, cols);
    r.get_bytes(t.data(), bytes, "tensor data");
    if (!set.emplace(std::move(name), std::move(t)).second) r.fail("duplicate tensor name", at);
  }
  return set;
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
  binary::Writer w;
  w.put_bytes(kMagic, 4);
  w.put<std::uint32_t>(kVersion);
  w.put_string(ckpt.model.config.to_text());
  w.put<std::uint64_t>(ckpt.model.config.architecture_hash());
  w.put<std::int64_t>(ckpt.step);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ckpt.meta.size()));
  for (const auto& [k, v] : ckpt.meta) {
    w.put_string(k);
    w.put_string(v);
  }
  put_tensors(w, ckpt.model.params);
  w.put<std::uint8_t>(ckpt.optimizer ? 1 : 0);
  if (ckpt.optimizer) {
    w.put<std::int64_t>(ckpt.optimizer->step);
    put_tensors(w, ckpt.optimizer->first);
    put_tensors(w, ckpt.optimizer->second);
  }
  return std::move(w.bytes());
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  binary::Reader r(bytes);
  char magic[4];
  r.get_bytes(magic, 4, "magic");
  if (std::string(magic, 4) != std::string(kMagic, 4)) r.fail("not a checkpoint (bad magic)", 0);
  const auto version = r.get<std::uint32_t>("version");
  if (version != kVersion) r.fail("unsupported checkpoint version " + std::to_string(version), 4);
  Checkpoint ckpt;
  const std::uint64_t config_at = r.offset();
  const std::string text = r.get_string("config");
  try {
    ckpt.model.config = ModelConfig::from_text(text);
  } catch (const ConfigError& e) {
    r.fail(std::string("invalid stored config: ") + e.what(), config_at);
  }
  const auto hash = r.get<std::uint64_t>("architecture hash");
  if (hash != ckpt.model.config.architecture_hash())
    throw ConfigError("checkpoint hash does not match its stored config");
  ckpt.step = r.get<std::int64_t>("step");
  const auto n_meta = r.get<std::uint32_t>("meta count");
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = r.get_string("meta key");
    ckpt.meta[k] = r.get_string("meta value");
  }
  ckpt.model.params = get_tensors(r);
  const auto has_opt = r.get<std::uint8_t>("optimizer flag");
  if (has_opt > 1) r.fail("bad optimizer flag", r.offset() - 1);
  if (has_opt) {
    OptimizerState opt;
    opt.step = r.get<std::int64_t>("optimizer step");
    opt.first = get_tensors(r);
    opt.second = get_tensors(r);
    ckpt.optimizer = std::move(opt);
  }
  if (r.remaining() != 0) r.fail("trailing bytes after checkpoint", r.offset());

  const Model reference = init_model(ckpt.model.config, 0);
  for (const auto& [name, t] : reference.params) {
    auto it = ckpt.model.params.find(name);
    if (it == ckpt.model.params.end()) throw FormatError("checkpoint is missing tensor '" + name + "'", 0);
    if (it->second.rows() != t.rows() || it->second.cols() != t.cols())
      throw FormatError("checkpoint tensor '" + name + "' has the wrong shape", 0);
  }
  if (ckpt.model.params.size() != reference.params.size())
    throw FormatError("checkpoint has unexpected extra tensors", 0);
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  binary::write_file(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) { return decode_checkpoint(binary::read_file(path)); }

void require_compatible(const ModelConfig& expected, const ModelConfig& stored) {
  const auto a = expected.architecture_hash(), b = stored.architecture_hash();
  if (a == b) return;
  std::ostringstream os;
  os << "checkpoint/config mismatch: config hash " << std::hex << a << ", checkpoint hash " << b;
  throw ConfigError(os.str());
}

}  // namespace chunkasr
