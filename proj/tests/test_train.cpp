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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "chunkasr/ctcalign/ctc.hpp"
#include "chunkasr/model/checkpoint.hpp"
#include "chunkasr/model/decoder.hpp"
#include "chunkasr/model/encoder.hpp"
#include "chunkasr/numcore/gradcheck.hpp"
#include "chunkasr/train/objective.hpp"
#include "chunkasr/train/schedule.hpp"
#include "chunkasr/train/trainer.hpp"
#include "test_util.hpp"

namespace chunkasr {
namespace {

using testing::random_matrix;
using testing::tiny_config;

InterleavedSequence make_seq(const std::vector<std::int64_t>& chunk_lengths, const std::vector<TokenSeq>& tokens,
                             int eos) {
  std::int64_t total = 0;
  for (auto l : chunk_lengths) total += l;
  SegmentedTranscript seg{tokens};
  return interleave(chunk_plan(total, chunk_lengths.front()), seg, eos);
}

TEST(BuildTargets, FigureLayout) {
  // a b c d 1 $ e f g h 2 3 4 $
  const int eos = 9;
  const auto seq = make_seq({4, 4}, {{1}, {2, 3, 4}}, eos);
  ASSERT_EQ(seq.size(), 14u);
  const auto t = build_targets(seq);
  const std::vector<int> expect{-1, -1, -1, 1, eos, -1, -1, -1, -1, 2, 3, 4, eos, -1};
  EXPECT_EQ(t.targets, expect);
  EXPECT_EQ(t.counted, 6u);
}

TEST(BuildTargets, EmptyChunkCountsOnlyEos) {
  const auto seq = make_seq({3, 3}, {{}, {0}}, 5);
  const auto t = build_targets(seq);
  EXPECT_EQ(t.targets[2], 5);
  EXPECT_EQ(t.targets[3], -1);  // EOS is followed by audio
  EXPECT_EQ(t.counted, 3u);
}

TEST(BuildTargets, CountsTokensPlusOneEosPerChunk) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    std::uniform_int_distribution<std::int64_t> frames(1, 30), chunk(1, 8);
    const ChunkPlan plan = chunk_plan(frames(rng), i % 10 == 0 ? kUnbounded : chunk(rng));
    const auto seg = testing::random_segmentation(plan, 5, 3, rng);
    const auto t = build_targets(interleave(plan, seg, 5));
    EXPECT_EQ(t.counted, seg.num_tokens() + static_cast<std::size_t>(plan.num_chunks()));
    if (plan.num_chunks() == 1) EXPECT_EQ(t.counted, seg.num_tokens() + 1);
  }
}

struct Example {
  Tensor<double> frames;
  TokenSeq transcript;
  SegmentedTranscript seg;
};

std::vector<Example> random_examples(const ModelConfig& cfg, int n, std::mt19937_64& rng) {
  std::vector<Example> out;
  std::uniform_int_distribution<std::int64_t> frames(4, 11);
  for (int i = 0; i < n; ++i) {
    Example e;
    const auto T = frames(rng);
    e.frames = random_matrix(T, cfg.input_dim, rng).cast<double>();
    const ChunkPlan plan = chunk_plan(T, cfg.chunk_frames);
    e.seg = testing::random_segmentation(plan, cfg.text_vocab, 2, rng);
    e.transcript = e.seg.flatten();
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<TrainItem<double>> items_of(const std::vector<Example>& ex) {
  std::vector<TrainItem<double>> items;
  for (const auto& e : ex) items.push_back({&e.frames, &e.transcript, &e.seg});
  return items;
}

TEST(TotalLoss, MatchesIndependentAssembly) {
  const ModelConfig cfg = tiny_config();
  const auto params = testing::to_double(init_model(cfg, 3).params);
  std::mt19937_64 rng(1);
  const auto ex = random_examples(cfg, 4, rng);

  Tape<double> tape(false);
  BoundParameters<double> bp(tape, params);
  const auto g = total_loss(bp, cfg, items_of(ex), 0.5);

  double nll = 0.0, ctc = 0.0;
  std::size_t counted = 0, tokens = 0;
  for (const auto& e : ex) {
    Tape<double> t2(false);
    BoundParameters<double> b2(t2, params);
    const auto enc = encoder_forward(b2, cfg, e.frames);
    const ChunkPlan plan = chunk_plan(e.frames.rows(), cfg.chunk_frames);
    const auto seq = interleave(plan, e.seg, cfg.text_vocab);
    const auto logp = decoder_forward_full(b2, cfg, enc.encodings, seq).value();
    const auto tg = build_targets(seq);
    for (std::size_t i = 0; i < tg.targets.size(); ++i)
      if (tg.targets[i] >= 0) nll -= logp(static_cast<Index>(i), tg.targets[i]);
    counted += tg.counted;
    if (ctc_feasible(e.frames.rows(), e.transcript)) {
      ctc += ctc_logloss(enc.ctc_logprobs.value(), e.transcript, cfg.text_vocab);
      tokens += e.transcript.size();
    }
  }
  const double ce = nll / static_cast<double>(counted);
  const double ctc_per_token = ctc / static_cast<double>(std::max<std::size_t>(tokens, 1));
  EXPECT_NEAR(g.breakdown.ce, ce, 1e-10);
  EXPECT_NEAR(g.breakdown.ctc, ctc_per_token, 1e-10);
  EXPECT_NEAR(g.breakdown.total, ce + 0.5 * ctc_per_token, 1e-10);
  EXPECT_EQ(g.breakdown.counted_slots, counted);

  Tape<double> t3(false);
  BoundParameters<double> b3(t3, params);
  const auto g0 = total_loss(b3, cfg, items_of(ex), 0.0);
  EXPECT_EQ(g0.breakdown.total, g0.breakdown.ce);
}

TEST(TotalLoss, InfeasibleCtcElementIsExcludedAndReported) {
  const ModelConfig cfg = tiny_config();
  const auto params = testing::to_double(init_model(cfg, 3).params);
  std::mt19937_64 rng(2);
  Example e;
  e.frames = random_matrix(2, cfg.input_dim, rng).cast<double>();
  e.seg.chunks = {{1, 1, 1}};
  e.transcript = e.seg.flatten();
  Tape<double> tape(false);
  BoundParameters<double> bp(tape, params);
  const auto g = total_loss(bp, cfg, items_of({e}), 0.5);
  EXPECT_EQ(g.breakdown.infeasible, (std::vector<std::size_t>{0}));
  EXPECT_EQ(g.breakdown.ctc, 0.0);
  EXPECT_TRUE(std::isfinite(g.breakdown.total));
}

TEST(TotalLoss, GradientMatchesFiniteDifferences) {
  ModelConfig cfg = tiny_config();
  cfg.lookahead = 1;
  const auto params = testing::to_double(init_model(cfg, 4).params);
  std::mt19937_64 rng(6);
  const auto ex = random_examples(cfg, 2, rng);
  Tape<double> tape(true);
  BoundParameters<double> bp(tape, params);
  const auto g = total_loss(bp, cfg, items_of(ex), 0.5);
  std::vector<Var<double>> leaves;
  for (const auto& [name, v] : bp.bound()) leaves.push_back(v);
  ASSERT_EQ(leaves.size(), params.size());
  const auto r = finite_diff_check(tape, g.total, std::span<const Var<double>>(leaves), 1e-6);
  EXPECT_LT(r.max_rel_error, 1e-4) << "input " << r.worst_input << " element " << r.worst_element;
}

TEST(TotalLoss, PermutationInvariant) {
  const ModelConfig cfg = tiny_config();
  const auto params = testing::to_double(init_model(cfg, 5).params);
  std::mt19937_64 rng(7);
  auto ex = random_examples(cfg, 5, rng);
  auto loss_of = [&](const std::vector<Example>& batch) {
    Tape<double> tape(false);
    BoundParameters<double> bp(tape, params);
    return total_loss(bp, cfg, items_of(batch), 0.5).breakdown.total;
  };
  const double a = loss_of(ex);
  std::reverse(ex.begin(), ex.end());
  std::swap(ex[0], ex[2]);
  EXPECT_NEAR(loss_of(ex), a, 1e-12);
}

TEST(Schedule, TriStageShape) {
  const TriStageSchedule s{100, 400, 500, 1e-3, 1e-5};
  EXPECT_NEAR(lr_at(s, 0), 1e-5, 1e-15);
  EXPECT_NEAR(lr_at(s, 50), 1e-5 + 0.5 * (1e-3 - 1e-5), 1e-15);
  EXPECT_DOUBLE_EQ(lr_at(s, 100), 1e-3);
  EXPECT_DOUBLE_EQ(lr_at(s, 499), 1e-3);
  EXPECT_NEAR(lr_at(s, 750), std::sqrt(1e-3 * 1e-5), 1e-12);
  EXPECT_NEAR(lr_at(s, 1000), 1e-5, 1e-15);
  EXPECT_NEAR(lr_at(s, 1000000), 1e-5, 1e-15);
  for (std::int64_t t = 1; t < 1000; ++t) EXPECT_LE(lr_at(s, t), 1e-3 + 1e-15);
  EXPECT_THROW((TriStageSchedule{-1, 0, 0, 1e-3, 1e-5}.validate()), ConfigError);
}

TEST(Schedule, SpanningSplitsTotal) {
  const auto s = TriStageSchedule::spanning(1000, 3e-3, 1.5e-4);
  EXPECT_EQ(s.warmup_steps, 100);
  EXPECT_EQ(s.hold_steps, 400);
  EXPECT_EQ(s.warmup_steps + s.hold_steps + s.decay_steps, 1000);
}

// Small noise-free corpus the tiny model can fit in a few epochs.
struct Corpus {
  std::vector<TrainExample> train, dev;
  TrainConfig cfg;
};

Corpus small_corpus(const std::string& dir = "") {
  SyntheticSpec spec;
  spec.vocab_size = 5;
  spec.feature_dim = 3;
  spec.stride = 2;
  spec.max_tokens = 6;
  Corpus c;
  c.train = make_examples(synth_generate(spec, 24), spec.stride);
  spec.seed = 2;
  c.dev = make_examples(synth_generate(spec, 6), spec.stride);
  c.cfg.model = tiny_config();
  c.cfg.pretrain_epochs = 1;
  c.cfg.epochs = 2;
  c.cfg.batch_size = 4;
  c.cfg.checkpoint_dir = dir;
  return c;
}

TEST(TrainLoop, DeterministicUnderSeed) {
  const Corpus c = small_corpus();
  const auto a = train_loop(c.train, c.dev, c.cfg);
  const auto b = train_loop(c.train, c.dev, c.cfg);
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) EXPECT_EQ(a.log[i].loss.total, b.log[i].loss.total);
  EXPECT_TRUE(a.last.model.params == b.last.model.params);
  EXPECT_EQ(a.log.front().loss.ce, 0.0);  // pretraining epoch is CTC only
  EXPECT_GT(a.log.back().loss.ce, 0.0);
}

TEST(TrainLoop, ResumeContinuesStepCounterAndMatchesUninterrupted) {
  const auto dir = std::filesystem::temp_directory_path() / "chunkasr_resume_test";
  std::filesystem::remove_all(dir);
  Corpus c = small_corpus(dir.string());
  const auto full = train_loop(c.train, c.dev, c.cfg);
  const Checkpoint first_epoch = load_checkpoint((dir / "epoch_001.ckpt").string());
  ASSERT_TRUE(first_epoch.optimizer.has_value());
  const auto resumed = train_loop(c.train, c.dev, c.cfg, &first_epoch);
  ASSERT_FALSE(resumed.log.empty());
  EXPECT_EQ(resumed.log.front().step, first_epoch.step);
  EXPECT_EQ(resumed.last.step, full.last.step);
  EXPECT_TRUE(resumed.last.model.params == full.last.model.params);
  std::filesystem::remove_all(dir);
}

TEST(TrainLoop, NonFiniteLossStopsWithLastGoodCheckpoint) {
  Corpus c = small_corpus();
  c.cfg.pretrain_epochs = 0;
  c.cfg.epochs = 1;
  c.cfg.batch_size = 1;
  c.train.resize(6);
  for (auto& e : c.train) e.frames(0, 0) = std::numeric_limits<float>::quiet_NaN();
  const Model init = init_model(c.cfg.model, c.cfg.seed);
  const auto r = train_loop(c.train, c.dev, c.cfg);
  EXPECT_TRUE(r.diverged);
  EXPECT_FALSE(r.divergence.empty());
  EXPECT_TRUE(r.last.model.params == init.params);
}

TEST(Checkpoint, RoundTripReproducesDevLoss) {
  const auto path = std::filesystem::temp_directory_path() / "chunkasr_roundtrip.ckpt";
  const Corpus c = small_corpus();
  Checkpoint ck;
  ck.model = init_model(c.cfg.model, 9);
  ck.step = 42;
  ck.meta["epoch"] = "3";
  save_checkpoint(path.string(), ck);
  const Checkpoint back = load_checkpoint(path.string());
  EXPECT_EQ(back.step, 42);
  EXPECT_EQ(back.meta, ck.meta);
  EXPECT_TRUE(back.model.config == ck.model.config);
  const double a = evaluate_loss(ck.model, c.dev, 0.5, AlignSource::kReference).total;
  const double b = evaluate_loss(back.model, c.dev, 0.5, AlignSource::kReference).total;
  EXPECT_NEAR(a, b, 1e-6);
  std::filesystem::remove(path);
}

TEST(Checkpoint, ArchitectureMismatchNamesBothHashes) {
  ModelConfig a = tiny_config(), b = tiny_config();
  b.dec_ffn = 16;
  try {
    require_compatible(a, b);
    FAIL();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(a.architecture_hash()));
    EXPECT_NE(msg.find(buf), std::string::npos) << msg;
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(b.architecture_hash()));
    EXPECT_NE(msg.find(buf), std::string::npos) << msg;
  }
  b = tiny_config();
  b.chunk_frames = 16;
  b.context_chunks = kUnbounded;
  EXPECT_NO_THROW(require_compatible(a, b));
}

TEST(Checkpoint, TruncatedFileIsRejected) {
  Checkpoint ck;
  ck.model = init_model(tiny_config(), 1);
  const std::string bytes = encode_checkpoint(ck);
  EXPECT_THROW(decode_checkpoint(bytes.substr(0, bytes.size() / 2)), FormatError);
}

}  // namespace
}  // namespace chunkasr
