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

// chunkasr command-line driver. Every command reads a sectioned config
// file (see `chunkasr config`), applies flag overrides and writes the
// resolved config next to its outputs.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "chunkasr/cli/run_config.hpp"
#include "chunkasr/data/binary_io.hpp"
#include "chunkasr/data/dataset_io.hpp"
#include "chunkasr/errors.hpp"
#include "chunkasr/evalbench/bench.hpp"
#include "chunkasr/evalbench/cost.hpp"
#include "chunkasr/model/checkpoint.hpp"
#include "chunkasr/model/decoder.hpp"

namespace fs = std::filesystem;
using namespace chunkasr;

namespace {

constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

// Raw feature shift; one encoder frame spans `stride` of these.
constexpr double kRawFrameMs = 10.0;

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double frame_ms(const RunConfig& rc) { return kRawFrameMs * rc.synth.stride; }

std::string ms_label(std::int64_t frames, const RunConfig& rc) {
  if (frames >= kUnbounded) return "inf";
  std::ostringstream os;
  os << static_cast<double>(frames) * frame_ms(rc);
  return os.str();
}

std::string join_tokens(const TokenSeq& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? " " : "") + std::to_string(t[i]);
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  binary::write_file(path.string(), text);
}

// Resolved config goes to <dir>/<command>.config.ini.
void emit_config(const RunConfig& rc, const fs::path& dir, const std::string& command) {
  write_text(dir / (command + ".config.ini"), rc.to_ini());
}

std::vector<Utterance> load_split(const RunConfig& rc, const std::string& split) {
  const fs::path path = fs::path(rc.data_dir) / (split + ".cads");
  if (!fs::exists(path)) throw DataError("missing dataset '" + path.string() + "' (run `chunkasr synth` first)");
  auto utts = load_dataset(path);
  for (const auto& u : utts)
    if (u.features.cols() != rc.synth.feature_dim)
      throw DataError("dataset '" + path.string() + "' has feature width " + std::to_string(u.features.cols()) +
                      ", config expects " + std::to_string(rc.synth.feature_dim));
  return utts;
}

Model load_model(const RunConfig& rc) {
  const std::string path = rc.checkpoint_path();
  if (!fs::exists(path)) throw DataError("missing checkpoint '" + path + "'");
  Checkpoint ck = load_checkpoint(path);
  require_compatible(rc.train.model, ck.model.config);
  // Streaming geometry is a decode-time choice.
  ck.model.config = rc.train.model;
  return std::move(ck.model);
}

// ---------------------------------------------------------------- synth

int cmd_synth(const RunConfig& rc, bool force) {
  const fs::path dir = rc.data_dir;
  const char* splits[] = {"train", "dev", "test"};
  const int counts[] = {rc.train_count, rc.dev_count, rc.test_count};
  if (!force)
    for (const char* s : splits)
      if (fs::exists(dir / (std::string(s) + ".cads")))
        throw DataError("'" + (dir / (std::string(s) + ".cads")).string() + "' exists; pass --force to overwrite");
  fs::create_directories(dir);
  for (int i = 0; i < 3; ++i) {
    SyntheticSpec spec = rc.synth;
    spec.seed = rc.synth.seed + static_cast<std::uint64_t>(i);
    const auto utts = synth_generate(spec, counts[i]);
    save_dataset(dir / (std::string(splits[i]) + ".cads"), utts);
    std::int64_t frames = 0, tokens = 0, longest = 0;
    for (const auto& u : utts) {
      const auto f = encoder_frames(u, spec.stride);
      frames += f;
      longest = std::max(longest, f);
      tokens += static_cast<std::int64_t>(u.transcript.size());
    }
    std::printf("%-5s utterances %d frames %lld (%.1f s) tokens %lld mean_tokens %.2f max_frames %lld\n", splits[i],
                counts[i], static_cast<long long>(frames), frames * frame_ms(rc) / 1000.0,
                static_cast<long long>(tokens), static_cast<double>(tokens) / counts[i],
                static_cast<long long>(longest));
  }
  emit_config(rc, dir, "synth");
  return 0;
}

// ---------------------------------------------------------------- train

int cmd_train(const RunConfig& rc, const std::string& resume_path) {
  const auto train = make_examples(load_split(rc, "train"), rc.synth.stride);
  const auto dev = make_examples(load_split(rc, "dev"), rc.synth.stride);
  TrainConfig cfg = rc.train;
  cfg.checkpoint_dir = rc.out_dir;
  fs::create_directories(rc.out_dir);
  emit_config(rc, rc.out_dir, "train");

  std::optional<Checkpoint> resume;
  if (!resume_path.empty()) {
    resume = load_checkpoint(resume_path);
    require_compatible(cfg.model, resume->model.config);
  }

  std::ofstream log(fs::path(rc.out_dir) / "train.log", resume ? std::ios::app : std::ios::trunc);
  const auto t0 = std::chrono::steady_clock::now();
  TrainResult result = train_loop(train, dev, cfg, resume ? &*resume : nullptr, [&](const StepRecord& r) {
    log << r.format() << '\n';
  });
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  ReportTable table;
  table.columns = {"epoch", "stage", "step", "train_loss", "dev_wer", "align_failures", "ctc_infeasible"};
  for (const auto& e : result.epochs)
    table.rows.push_back({{"epoch", e.epoch},
                          {"stage", e.joint ? "joint" : "ctc"},
                          {"step", e.step},
                          {"train_loss", e.train_loss},
                          {"dev_wer", e.dev_wer < 0 ? nlohmann::json(nullptr) : nlohmann::json(100.0 * e.dev_wer)},
                          {"align_failures", e.align_failures},
                          {"ctc_infeasible", e.ctc_infeasible}});
  std::cout << table.to_text();
  write_text(fs::path(rc.out_dir) / "train.jsonl", table.to_jsonl(rc.to_json()));
  std::printf("best epoch %d dev WER %.2f%% wall %.1f s\n", result.best_epoch, 100.0 * result.best_dev_wer, secs);
  if (result.diverged) {
    std::fprintf(stderr, "training diverged: %s\n", result.divergence.c_str());
    return kExitNumerical;
  }
  return 0;
}

// ---------------------------------------------------------------- align

int cmd_align(const RunConfig& rc) {
  const Model model = load_model(rc);
  const auto data = make_examples(load_split(rc, rc.split), rc.synth.stride);
  const double ms = frame_ms(rc);
  fs::create_directories(rc.out_dir);
  emit_config(rc, rc.out_dir, "align");
  std::ofstream records(fs::path(rc.out_dir) / "align.jsonl");
  const nlohmann::json config = rc.to_json();

  std::vector<std::int64_t> all, all_ref;
  std::size_t infeasible = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& ex = data[i];
    std::vector<std::int64_t> ends;
    try {
      ends = ctc_end_frames(model, ex);
    } catch (const InfeasibleError&) {
      ++infeasible;
      std::printf("utt %zu infeasible\n", i);
      continue;
    }
    for (std::size_t j = 0; j < ends.size(); ++j) {
      std::printf("utt %zu token %zu id %d end_frame %lld end_s %.3f", i, j, ex.transcript[j],
                  static_cast<long long>(ends[j]), (ends[j] + 1) * ms / 1000.0);
      if (ex.ref_end_frames) std::printf(" ref_end_frame %lld", static_cast<long long>((*ex.ref_end_frames)[j]));
      std::printf("\n");
    }
    nlohmann::json rec = {{"utterance", i}, {"tokens", ex.transcript}, {"end_frames", ends}};
    if (ex.ref_end_frames) {
      rec["ref_end_frames"] = *ex.ref_end_frames;
      all.insert(all.end(), ends.begin(), ends.end());
      all_ref.insert(all_ref.end(), ex.ref_end_frames->begin(), ex.ref_end_frames->end());
    }
    rec["config"] = config;
    records << rec.dump() << '\n';
  }
  if (!all.empty()) {
    const double delay = alignment_delay(all, all_ref), delta = alignment_delta(all, all_ref);
    std::printf("alignment delay %.3f frames (%.1f ms) delta %.3f frames (%.1f ms) over %zu tokens\n", delay,
                delay * ms, delta, delta * ms, all.size());
  }
  if (infeasible) std::printf("infeasible utterances %zu\n", infeasible);
  return 0;
}

// ---------------------------------------------------------------- decode

std::string trace_line(const ChunkTrace& t, int eos) {
  std::ostringstream os;
  os << "  chunk " << t.chunk << " tokens [" << join_tokens(t.best_tokens) << "] $" << eos
     << (t.forced_eos ? " (forced)" : "") << " | confirmed [" << join_tokens(t.confirmed) << "] provisional ["
     << join_tokens(t.provisional) << "]";
  return os.str();
}

int cmd_decode(const RunConfig& rc) {
  const Model model = load_model(rc);
  const auto data = make_examples(load_split(rc, rc.split), rc.synth.stride);
  fs::create_directories(rc.out_dir);
  emit_config(rc, rc.out_dir, "decode");
  const CorpusDecode out = decode_corpus(model, data, {rc.beam, rc.threads});
  std::ofstream records(fs::path(rc.out_dir) / "decode.jsonl");
  const nlohmann::json config = rc.to_json();
  const int eos = model.config.text_vocab;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& r = out.results[i];
    const WerReport w = wer(data[i].transcript, r.transcript);
    std::printf("utt %zu ref [%s] hyp [%s] errors %lld\n", i, join_tokens(data[i].transcript).c_str(),
                join_tokens(r.transcript).c_str(), static_cast<long long>(w.errors()));
    nlohmann::json rec = {{"utterance", i},       {"reference", data[i].transcript}, {"hypothesis", r.transcript},
                          {"score", r.score},     {"substitutions", w.substitutions},            {"deletions", w.deletions},
                          {"insertions", w.insertions},    {"chunks", r.trace.size()}};
    if (rc.emit_trace) {
      nlohmann::json chunks = nlohmann::json::array();
      for (const auto& t : r.trace) {
        std::printf("%s\n", trace_line(t, eos).c_str());
        chunks.push_back({{"chunk", t.chunk},
                          {"tokens", t.best_tokens},
                          {"forced_eos", t.forced_eos},
                          {"confirmed", t.confirmed},
                          {"provisional", t.provisional}});
      }
      rec["trace"] = chunks;
    }
    rec["config"] = config;
    records << rec.dump() << '\n';
  }
  const auto& all = out.wer.all;
  std::printf("WER %.2f%% (S %lld D %lld I %lld N %lld) over %zu utterances, beam %d\n", 100.0 * all.wer(),
              static_cast<long long>(all.substitutions), static_cast<long long>(all.deletions), static_cast<long long>(all.insertions),
              static_cast<long long>(all.ref_length), data.size(), rc.beam);
  return 0;
}

// ---------------------------------------------------------------- eval

int cmd_eval(const RunConfig& rc) {
  const Model model = load_model(rc);
  const auto corpus = load_split(rc, rc.split);
  fs::create_directories(rc.out_dir);
  emit_config(rc, rc.out_dir, "eval");
  const auto rows = concat_eval(model, corpus, rc.concat, {rc.beam, rc.threads}, rc.gap_frames, rc.synth.stride);
  ReportTable table = concat_table(rows);
  std::cout << table.to_text();
  write_text(fs::path(rc.out_dir) / "eval.jsonl", table.to_jsonl(rc.to_json()));
  return 0;
}

// ---------------------------------------------------------------- ablate

int cmd_ablate(const RunConfig& rc) {
  const auto train = make_examples(load_split(rc, "train"), rc.synth.stride);
  const auto dev = make_examples(load_split(rc, "dev"), rc.synth.stride);
  fs::create_directories(rc.out_dir);
  emit_config(rc, rc.out_dir, "ablate");
  const ModelSource source = [&](const TrainConfig& cell) {
    TrainConfig cfg = cell;
    cfg.checkpoint_dir = (fs::path(rc.out_dir) / ("ablate_c" + format_count(cfg.model.chunk_frames) + "_b" +
                                                  format_count(cfg.model.context_chunks)))
                             .string();
    TrainResult r = train_loop(train, dev, cfg);
    if (r.diverged) throw NumericalError("ablation cell diverged: " + r.divergence);
    return r.best.model;
  };
  const auto cells = ablation_grid(train, dev, rc.train, rc.ablate_chunks, rc.ablate_contexts,
                                   {rc.beam, rc.threads}, source);
  ReportTable table = ablation_table(cells);
  table.columns.insert(table.columns.begin() + 1, "chunk_ms");
  table.columns.insert(table.columns.begin() + 3, "context_ms");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    table.rows[i]["chunk_ms"] = ms_label(c.chunk_frames, rc);
    table.rows[i]["context_ms"] =
        c.context_chunks >= kUnbounded ? "inf" : ms_label(c.context_chunks * c.chunk_frames, rc);
  }
  std::cout << table.to_text();
  write_text(fs::path(rc.out_dir) / "ablate.jsonl", table.to_jsonl(rc.to_json()));
  return 0;
}

// ---------------------------------------------------------------- bench

// Seconds per emitted token for teacher-forced incremental decoding of a
// random model over `frames` frames and `tokens` evenly spread tokens.
double time_incremental(const Model& model, std::int64_t frames, std::int64_t tokens, std::uint64_t seed) {
  const auto& cfg = model.config;
  const ChunkPlan plan = chunk_plan(frames, cfg.chunk_frames);
  const auto per_chunk = spread_tokens(tokens, plan.num_chunks());
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal(0.0f, 1.0f);
  std::uniform_int_distribution<int> token(0, cfg.text_vocab - 1);
  DecoderCache cache(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  for (std::int64_t k = 0; k < plan.num_chunks(); ++k) {
    cache_evict(cache, k, cfg.context_chunks);
    std::vector<StepSlot> audio;
    for (std::int64_t f = plan.begin(k); f < plan.end(k); ++f) {
      StepSlot s{SlotRole::kAudio, k, -1, RowVector<float>(cfg.enc_dim)};
      for (Index j = 0; j < s.encoding.size(); ++j) s.encoding[j] = normal(rng);
      audio.push_back(std::move(s));
    }
    decoder_step(model, cache, audio);
    for (std::int64_t u = 0; u < per_chunk[static_cast<std::size_t>(k)]; ++u)
      decoder_step(model, cache, {StepSlot{SlotRole::kText, k, token(rng), {}}});
    decoder_step(model, cache, {StepSlot{SlotRole::kEos, k, cfg.text_vocab, {}}});
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return secs / static_cast<double>(tokens + plan.num_chunks());
}

int cmd_bench(const RunConfig& rc) {
  fs::create_directories(rc.out_dir);
  emit_config(rc, rc.out_dir, "bench");
  const auto& m = rc.train.model;
  ReportTable table;
  table.columns = {"context_chunks", "multiplier", "frames", "tokens", "emitted", "total_pairs", "pairs_per_token",
                   "marginal_pairs_per_token", "growth"};
  if (rc.wall_clock) table.columns.push_back("us_per_token");
  std::optional<Model> model;
  if (rc.wall_clock) model = init_model(m, rc.train.seed);
  for (const auto b : rc.bench_contexts) {
    double base = 0.0;
    for (const int mult : rc.bench_lengths) {
      const CostReport r =
          attention_cost(rc.bench_frames * mult, rc.bench_tokens * mult, m.chunk_frames, b, m.attend_prev_eos);
      if (base == 0.0) base = r.marginal_pairs_per_token;
      nlohmann::json row = {{"context_chunks", format_count(b)},
                            {"multiplier", mult},
                            {"frames", r.frames},
                            {"tokens", r.tokens},
                            {"emitted", r.emitted},
                            {"total_pairs", r.total_pairs},
                            {"pairs_per_token", r.pairs_per_token},
                            {"marginal_pairs_per_token", r.marginal_pairs_per_token},
                            {"growth", r.marginal_pairs_per_token / base}};
      if (model) {
        model->config.context_chunks = b;
        row["us_per_token"] = 1e6 * time_incremental(*model, r.frames, r.tokens, rc.train.seed);
      }
      table.rows.push_back(std::move(row));
    }
  }
  std::cout << table.to_text();
  write_text(fs::path(rc.out_dir) / "bench.jsonl", table.to_jsonl(rc.to_json()));
  return 0;
}

struct Overrides {
  std::vector<std::string> assignments;  // section.key=value
  std::string config_path;
};

RunConfig resolve(const Overrides& o, const std::vector<std::pair<std::string, std::string>>& flags) {
  RunConfig rc = o.config_path.empty() ? RunConfig{} : RunConfig::load(o.config_path);
  std::vector<std::pair<std::string, std::string>> all;
  std::string errors;
  for (const auto& a : o.assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos)
      errors += "\n  --set expects section.key=value, got '" + a + "'";
    else
      all.emplace_back(a.substr(0, eq), a.substr(eq + 1));
  }
  all.insert(all.end(), flags.begin(), flags.end());
  for (const auto& [key, value] : all) {
    try {
      rc.set(key, value);
    } catch (const ConfigError& e) {
      errors += std::string("\n  ") + e.what();
    }
  }
  if (!errors.empty()) throw ConfigError("invalid configuration:" + errors);
  rc.validate();
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chunkasr: chunked streaming speech recognition on synthetic data"};
  app.require_subcommand(1);
  Overrides ov;
  app.add_option("-c,--config", ov.config_path, "config file (sections of key = value)");
  app.add_option("--set", ov.assignments, "override a field, section.key=value (repeatable)");
  std::string out_dir;
  app.add_option("-o,--out-dir", out_dir, "output directory (run.out_dir)");

  // Flags that map onto config fields are collected as (key, value).
  std::vector<std::pair<std::string, std::string>> flags;
  auto field_flag = [&](CLI::App* cmd, const std::string& name, const std::string& key, const std::string& doc) {
    cmd->add_option_function<std::string>(name, [&flags, key](const std::string& v) { flags.emplace_back(key, v); },
                                          doc);
  };

  auto* config = app.add_subcommand("config", "print every config field with its default");

  auto* synth = app.add_subcommand("synth", "write train/dev/test synthetic corpora");
  bool force = false;
  synth->add_flag("--force", force, "overwrite existing dataset files");
  field_flag(synth, "--seed", "data.seed", "utterance seed");
  int fixed_tokens = -1;
  synth->add_option("--tokens", fixed_tokens, "fixed transcript length for every utterance");

  auto* train = app.add_subcommand("train", "train a model; writes best.ckpt and train.log");
  field_flag(train, "--align-source", "train.align_source", "reference or ctc");
  field_flag(train, "--seed", "train.seed", "training seed");
  std::string resume;
  train->add_option("--resume", resume, "checkpoint to continue from");

  auto* align = app.add_subcommand("align", "CTC forced alignment of a split with a trained encoder");
  auto* decode = app.add_subcommand("decode", "streaming beam-search decoding of a split");
  auto* eval = app.add_subcommand("eval", "WER on repeated (concatenated) utterances");
  auto* ablate = app.add_subcommand("ablate", "train and evaluate a chunk size x context grid");
  auto* bench = app.add_subcommand("bench", "decoder attention cost versus utterance length");
  for (auto* cmd : {align, decode, eval}) {
    field_flag(cmd, "--checkpoint", "decode.checkpoint", "checkpoint path");
    field_flag(cmd, "--split", "decode.split", "train, dev or test");
    field_flag(cmd, "--chunk-frames", "model.chunk_frames", "chunk size in encoder frames");
    field_flag(cmd, "--context-chunks", "model.context_chunks", "decoder context in chunks (or inf)");
    field_flag(cmd, "--max-tokens-per-chunk", "model.max_tokens_per_chunk", "token cap per chunk");
  }
  for (auto* cmd : {decode, eval, ablate}) {
    field_flag(cmd, "--beam", "decode.beam", "beam width");
    field_flag(cmd, "--threads", "decode.threads", "decoding threads");
  }
  decode->add_flag_function("--emit-trace", [&](std::int64_t) { flags.emplace_back("decode.emit_trace", "true"); },
                            "print per-chunk confirmed/provisional output");
  field_flag(eval, "--concat", "eval.concat", "multipliers, e.g. 1,2,10");
  field_flag(ablate, "--chunks", "ablate.chunks", "chunk sizes in frames");
  field_flag(ablate, "--contexts", "ablate.contexts", "contexts in chunks");
  field_flag(bench, "--lengths", "bench.lengths", "length multipliers, e.g. 1,2,5,10");
  field_flag(bench, "--contexts", "bench.contexts", "contexts in chunks, e.g. 2,inf");
  bench->add_flag_function("--wall-clock", [&](std::int64_t) { flags.emplace_back("bench.wall_clock", "true"); },
                           "also time incremental decoding");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (config->parsed()) {
      std::cout << RunConfig::documented_defaults();
      return 0;
    }
    if (!out_dir.empty()) flags.emplace_back("run.out_dir", out_dir);
    if (synth->parsed() && fixed_tokens >= 0) {
      if (fixed_tokens < 2) throw ConfigError("--tokens must be >= 2, got " + std::to_string(fixed_tokens));
      flags.emplace_back("data.min_tokens", std::to_string(fixed_tokens));
      flags.emplace_back("data.max_tokens", std::to_string(fixed_tokens));
    }
    const RunConfig rc = resolve(ov, flags);
    if (synth->parsed()) return cmd_synth(rc, force);
    if (train->parsed()) return cmd_train(rc, resume);
    if (align->parsed()) return cmd_align(rc);
    if (decode->parsed()) return cmd_decode(rc);
    if (eval->parsed()) return cmd_eval(rc);
    if (ablate->parsed()) return cmd_ablate(rc);
    if (bench->parsed()) return cmd_bench(rc);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitOther;
  }
  return kExitOther;
}
