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

#include "chunkasr/data/synth.hpp"

#include <random>
#include <string>

#include "chunkasr/errors.hpp"

namespace chunkasr {

void SyntheticSpec::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("synthetic spec: " + field + " " + why);
  };
  if (vocab_size < 3) fail("vocab_size", "must be >= 3");
  if (feature_dim < 1) fail("feature_dim", "must be >= 1");
  if (min_duration < 1) fail("min_duration", "must be >= 1");
  if (max_duration < min_duration) fail("max_duration", "must be >= min_duration");
  if (!(noise_stddev >= 0)) fail("noise_stddev", "must be >= 0");
  if (min_tokens < 2) fail("min_tokens", "must be >= 2");
  if (max_tokens < min_tokens) fail("max_tokens", "must be >= min_tokens");
  if (stride < 1) fail("stride", "must be >= 1");
}

FrameMatrix synth_templates(const SyntheticSpec& spec) {
  std::mt19937_64 rng(spec.template_seed);
  std::normal_distribution<float> normal(0.0f, 1.0f);
  FrameMatrix tmpl(spec.vocab_size, spec.feature_dim);
  for (Index i = 0; i < tmpl.size(); ++i) tmpl.data()[i] = normal(rng);
  return tmpl;
}

std::vector<Utterance> synth_generate(const SyntheticSpec& spec, int n) {
  spec.validate();
  const FrameMatrix tmpl = synth_templates(spec);
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> length(spec.min_tokens, spec.max_tokens);
  std::uniform_int_distribution<int> duration(spec.min_duration, spec.max_duration);
  std::normal_distribution<float> noise(0.0f, 1.0f);

  // Uniform draw from the vocabulary excluding up to two ids.
  auto draw = [&](int skip_a, int skip_b) {
    int excluded = (skip_a >= 0) + (skip_b >= 0 && skip_b != skip_a);
    std::uniform_int_distribution<int> pick(0, spec.vocab_size - 1 - excluded);
    int v = pick(rng);
    for (int t = 0; t < spec.vocab_size; ++t) {
      if (t == skip_a || t == skip_b) continue;
      if (v-- == 0) return t;
    }
    return 0;
  };

  std::vector<Utterance> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Utterance u;
    const int num_tokens = length(rng);
    for (int k = 0; k < num_tokens; ++k) {
      const int prev = k == 0 ? -1 : u.transcript.back();
      const int first = (k == num_tokens - 1 && k > 0) ? u.transcript.front() : -1;
      u.transcript.push_back(draw(prev, first));
    }
    std::vector<int> durations;
    std::int64_t total = 0;
    std::vector<std::int64_t> ends;
    for (int k = 0; k < num_tokens; ++k) {
      durations.push_back(duration(rng));
      total += durations.back();
      ends.push_back(total - 1);
    }
    u.features.resize(total * spec.stride, spec.feature_dim);
    Index row = 0;
    for (int k = 0; k < num_tokens; ++k)
      for (int f = 0; f < durations[static_cast<std::size_t>(k)] * spec.stride; ++f, ++row) {
        u.features.row(row) = tmpl.row(u.transcript[static_cast<std::size_t>(k)]);
        if (spec.noise_stddev > 0)
          for (Index c = 0; c < spec.feature_dim; ++c)
            u.features(row, c) += static_cast<float>(spec.noise_stddev) * noise(rng);
      }
    u.ref_end_frames = std::move(ends);
    out.push_back(std::move(u));
  }
  return out;
}

std::int64_t encoder_frames(const Utterance& u, int stride) { return (u.features.rows() + stride - 1) / stride; }

Utterance repeat_utterance(const Utterance& u, int times, int gap_frames, int stride) {
  if (times < 1) throw ConfigError("repeat_utterance: multiplier must be >= 1");
  if (u.features.rows() % stride != 0)
    throw ShapeError("repeat_utterance: features must be a whole number of stacked frames");
  const Index gap_rows = static_cast<Index>(gap_frames) * stride;
  const Index rows = u.features.rows() * times + gap_rows * (times - 1);
  Utterance out;
  out.features = FrameMatrix::Zero(rows, u.features.cols());
  const std::int64_t span = encoder_frames(u, stride) + gap_frames;
  std::vector<std::int64_t> ends;
  Index r = 0;
  for (int i = 0; i < times; ++i) {
    out.features.middleRows(r, u.features.rows()) = u.features;
    r += u.features.rows() + gap_rows;
    out.transcript.insert(out.transcript.end(), u.transcript.begin(), u.transcript.end());
    if (u.ref_end_frames)
      for (auto e : *u.ref_end_frames) ends.push_back(e + span * i);
  }
  if (u.ref_end_frames) out.ref_end_frames = std::move(ends);
  return out;
}

}  // namespace chunkasr
