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

#include "chunkasr/data/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include "chunkasr/data/binary_io.hpp"

namespace chunkasr {

namespace {
constexpr char kMagic[4] = {'C', 'A', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

namespace binary {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace binary

std::string encode_dataset(const std::vector<Utterance>& utts) {
  binary::Writer w;
  w.put_bytes(kMagic, 4);
  w.put<std::uint32_t>(kVersion);
  const auto dim = utts.empty() ? 0u : static_cast<std::uint32_t>(utts.front().features.cols());
  w.put<std::uint32_t>(dim);
  w.put<std::uint64_t>(utts.size());
  for (const auto& u : utts) {
    if (static_cast<std::uint32_t>(u.features.cols()) != dim)
      throw ShapeError("save_dataset: utterances have different feature dimensions");
    w.put<std::uint32_t>(static_cast<std::uint32_t>(u.features.rows()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(u.transcript.size()));
    w.put<std::uint8_t>(u.ref_end_frames ? 1 : 0);
    w.put_bytes(u.features.data(), sizeof(float) * static_cast<std::size_t>(u.features.size()));
    for (int t : u.transcript) w.put<std::int32_t>(t);
    if (u.ref_end_frames) {
      if (u.ref_end_frames->size() != u.transcript.size())
        throw ShapeError("save_dataset: ref_end_frames length differs from transcript");
      for (auto e : *u.ref_end_frames) w.put<std::int64_t>(e);
    }
  }
  return std::move(w.bytes());
}

std::vector<Utterance> decode_dataset(const std::string& bytes) {
  binary::Reader r(bytes);
  char magic[4];
  r.get_bytes(magic, 4, "magic");
  if (std::string(magic, 4) != std::string(kMagic, 4)) r.fail("bad magic, not a dataset file", 0);
  const std::uint64_t vpos = r.offset();
  const auto version = r.get<std::uint32_t>("version");
  if (version != kVersion) r.fail("unsupported dataset version " + std::to_string(version), vpos);
  const auto dim = r.get<std::uint32_t>("feature_dim");
  const std::uint64_t cpos = r.offset();
  const auto count = r.get<std::uint64_t>("count");
  // Each record needs at least 9 header bytes.
  if (count > r.remaining() / 9 + 1) r.fail("utterance count exceeds file size", cpos);
  std::vector<Utterance> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Utterance u;
    const auto frames = r.get<std::uint32_t>("frame count");
    const auto tokens = r.get<std::uint32_t>("token count");
    const std::uint64_t fpos = r.offset();
    const auto has_ref = r.get<std::uint8_t>("ref flag");
    if (has_ref > 1) r.fail("invalid ref flag", fpos);
    const std::uint64_t need = std::uint64_t(frames) * dim * sizeof(float);
    if (need > r.remaining()) r.fail("truncated features", r.offset());
    u.features.resize(frames, dim);
    r.get_bytes(u.features.data(), need, "features");
    u.transcript.resize(tokens);
    for (auto& t : u.transcript) t = r.get<std::int32_t>("transcript");
    if (has_ref) {
      std::vector<std::int64_t> ends(tokens);
      for (auto& e : ends) e = r.get<std::int64_t>("ref_end_frames");
      u.ref_end_frames = std::move(ends);
    }
    out.push_back(std::move(u));
  }
  if (r.remaining() != 0) r.fail("trailing bytes after last utterance", r.offset());
  return out;
}

void save_dataset(const std::filesystem::path& path, const std::vector<Utterance>& utts) {
  binary::write_file(path.string(), encode_dataset(utts));
}

std::vector<Utterance> load_dataset(const std::filesystem::path& path) {
  return decode_dataset(binary::read_file(path.string()));
}

}  // namespace chunkasr
