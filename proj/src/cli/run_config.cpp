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

#include "chunkasr/cli/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "chunkasr/data/binary_io.hpp"
#include "chunkasr/errors.hpp"

namespace chunkasr {

namespace {

struct Field {
  const char* section;
  const char* key;
  const char* doc;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

int to_int(const std::string& s) {
  std::size_t used = 0;
  const long long v = std::stoll(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters");
  return static_cast<int>(v);
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("expected true/false");
}

std::vector<int> to_int_list(const std::string& s) {
  std::vector<int> out;
  for (std::int64_t v : parse_count_list(s)) out.push_back(static_cast<int>(v));
  return out;
}

std::string from_int_list(const std::vector<int>& v) {
  std::vector<std::int64_t> w(v.begin(), v.end());
  return format_count_list(w);
}

#define INT_FIELD(sec, name, member, doc) \
  {sec, name, doc, [](const RunConfig& c) { return std::to_string(c.member); }, \
   [](RunConfig& c, const std::string& v) { c.member = to_int(v); }}
#define COUNT_FIELD(sec, name, member, doc) \
  {sec, name, doc, [](const RunConfig& c) { return format_count(c.member); }, \
   [](RunConfig& c, const std::string& v) { c.member = parse_count(v); }}
#define U64_FIELD(sec, name, member, doc) \
  {sec, name, doc, [](const RunConfig& c) { return std::to_string(c.member); }, \
   [](RunConfig& c, const std::string& v) { c.member = std::stoull(v); }}
#define REAL_FIELD(sec, name, member, doc) \
  {sec, name, doc, [](const RunConfig& c) { return fmt(c.member); }, \
   [](RunConfig& c, const std::string& v) { c.member = to_double(v); }}
#define BOOL_FIELD(sec, name, member, doc) \
  {sec, name, doc, [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }, \
   [](RunConfig& c, const std::string& v) { c.member = to_bool(v); }}
#define STR_FIELD(sec, name, member, doc) \
  {sec, name, doc, [](const RunConfig& c) { return c.member; }, [](RunConfig& c, const std::string& v) { c.member = v; }}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      INT_FIELD("model", "text_vocab", train.model.text_vocab, "text vocabulary size V (EOS = V)"),
      INT_FIELD("model", "input_dim", train.model.input_dim, "stacked feature width (feature_dim x stride)"),
      INT_FIELD("model", "enc_layers", train.model.enc_layers, "encoder layers"),
      INT_FIELD("model", "enc_heads", train.model.enc_heads, "encoder attention heads"),
      INT_FIELD("model", "enc_dim", train.model.enc_dim, "encoder width"),
      INT_FIELD("model", "enc_ffn", train.model.enc_ffn, "encoder feed-forward width"),
      COUNT_FIELD("model", "enc_left_chunks", train.model.enc_left_chunks, "encoder left context in chunks, or inf"),
      INT_FIELD("model", "lookahead", train.model.lookahead, "encoder lookahead frames"),
      INT_FIELD("model", "dec_layers", train.model.dec_layers, "decoder layers"),
      INT_FIELD("model", "dec_heads", train.model.dec_heads, "decoder attention heads"),
      INT_FIELD("model", "dec_dim", train.model.dec_dim, "decoder width"),
      INT_FIELD("model", "dec_ffn", train.model.dec_ffn, "decoder feed-forward width"),
      COUNT_FIELD("model", "chunk_frames", train.model.chunk_frames, "chunk size c in encoder frames, or inf"),
      COUNT_FIELD("model", "context_chunks", train.model.context_chunks, "decoder context b in chunks, or inf"),
      BOOL_FIELD("model", "attend_prev_eos", train.model.attend_prev_eos, "earlier chunks' EOS slots are attendable"),
      INT_FIELD("model", "max_tokens_per_chunk", train.model.max_tokens_per_chunk, "token cap per chunk, 0 = chunk length"),
      REAL_FIELD("model", "rope_base", train.model.rope_base, "rotary embedding base"),

      INT_FIELD("train", "pretrain_epochs", train.pretrain_epochs, "encoder-only CTC epochs"),
      INT_FIELD("train", "epochs", train.epochs, "joint training epochs"),
      INT_FIELD("train", "batch_size", train.batch_size, "utterances per step"),
      REAL_FIELD("train", "ctc_weight", train.ctc_weight, "auxiliary CTC loss weight"),
      REAL_FIELD("train", "peak_lr", train.peak_lr, "tri-stage peak learning rate"),
      REAL_FIELD("train", "floor_lr", train.floor_lr, "tri-stage final learning rate"),
      REAL_FIELD("train", "warmup_fraction", train.warmup_fraction, "share of steps in warmup"),
      REAL_FIELD("train", "hold_fraction", train.hold_fraction, "share of steps at peak"),
      REAL_FIELD("train", "clip_norm", train.clip_norm, "global gradient norm clip, 0 = off"),
      {"train", "align_source", "segmentation source: reference or ctc",
       [](const RunConfig& c) { return std::string(to_string(c.train.align_source)); },
       [](RunConfig& c, const std::string& v) { c.train.align_source = parse_align_source(v); }},
      U64_FIELD("train", "seed", train.seed, "initialization and shuffling seed"),

      STR_FIELD("data", "dir", data_dir, "directory of train/dev/test .cads files"),
      INT_FIELD("data", "train_count", train_count, "training utterances"),
      INT_FIELD("data", "dev_count", dev_count, "dev utterances"),
      INT_FIELD("data", "test_count", test_count, "test utterances"),
      INT_FIELD("data", "vocab_size", synth.vocab_size, "synthetic token types (must equal model.text_vocab)"),
      INT_FIELD("data", "feature_dim", synth.feature_dim, "raw feature width"),
      INT_FIELD("data", "stride", synth.stride, "raw frames stacked per encoder frame"),
      INT_FIELD("data", "min_duration", synth.min_duration, "shortest token duration in encoder frames"),
      INT_FIELD("data", "max_duration", synth.max_duration, "longest token duration in encoder frames"),
      REAL_FIELD("data", "noise_stddev", synth.noise_stddev, "Gaussian feature noise"),
      INT_FIELD("data", "min_tokens", synth.min_tokens, "shortest transcript"),
      INT_FIELD("data", "max_tokens", synth.max_tokens, "longest transcript"),
      U64_FIELD("data", "template_seed", synth.template_seed, "seed of the per-token templates"),
      U64_FIELD("data", "seed", synth.seed, "utterance seed (dev and test use seed+1, seed+2)"),

      STR_FIELD("run", "out_dir", out_dir, "output directory"),

      INT_FIELD("decode", "beam", beam, "beam width"),
      INT_FIELD("decode", "threads", threads, "decoding threads"),
      STR_FIELD("decode", "split", split, "dataset split to decode: train, dev or test"),
      STR_FIELD("decode", "checkpoint", checkpoint, "checkpoint path, empty = <out_dir>/best.ckpt"),
      BOOL_FIELD("decode", "emit_trace", emit_trace, "print per-chunk confirmed/provisional output"),

      {"eval", "concat", "concatenation multipliers",
       [](const RunConfig& c) { return from_int_list(c.concat); },
       [](RunConfig& c, const std::string& v) { c.concat = to_int_list(v); }},
      INT_FIELD("eval", "gap_frames", gap_frames, "silent encoder frames between concatenated copies"),

      {"ablate", "chunks", "chunk sizes in frames",
       [](const RunConfig& c) { return format_count_list(c.ablate_chunks); },
       [](RunConfig& c, const std::string& v) { c.ablate_chunks = parse_count_list(v); }},
      {"ablate", "contexts", "decoder contexts in chunks",
       [](const RunConfig& c) { return format_count_list(c.ablate_contexts); },
       [](RunConfig& c, const std::string& v) { c.ablate_contexts = parse_count_list(v); }},

      {"bench", "lengths", "length multipliers",
       [](const RunConfig& c) { return from_int_list(c.bench_lengths); },
       [](RunConfig& c, const std::string& v) { c.bench_lengths = to_int_list(v); }},
      {"bench", "contexts", "decoder contexts in chunks",
       [](const RunConfig& c) { return format_count_list(c.bench_contexts); },
       [](RunConfig& c, const std::string& v) { c.bench_contexts = parse_count_list(v); }},
      COUNT_FIELD("bench", "frames", bench_frames, "encoder frames at 1x"),
      COUNT_FIELD("bench", "tokens", bench_tokens, "text tokens at 1x"),
      BOOL_FIELD("bench", "wall_clock", wall_clock, "also time teacher-forced incremental decoding"),
  };
  return f;
}

#undef INT_FIELD
#undef COUNT_FIELD
#undef U64_FIELD
#undef REAL_FIELD
#undef BOOL_FIELD
#undef STR_FIELD

const Field* find_field(const std::string& section, const std::string& key) {
  for (const Field& f : fields())
    if (section == f.section && key == f.key) return &f;
  return nullptr;
}

void assign(RunConfig& c, const Field& f, const std::string& value) {
  try {
    f.set(c, value);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(f.section) + "." + f.key + ": " + e.what());
  } catch (const std::exception&) {
    throw ConfigError(std::string(f.section) + "." + f.key + ": invalid value '" + value + "'");
  }
}

}  // namespace

std::vector<std::int64_t> parse_count_list(const std::string& s) {
  std::vector<std::int64_t> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("empty list item in '" + s + "'");
    out.push_back(parse_count(item.substr(b, e - b + 1)));
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::string format_count_list(const std::vector<std::int64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_count(v[i]);
  return s;
}

void RunConfig::validate() const {
  std::vector<std::string> errors;
  auto check = [&](const std::function<void()>& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      errors.push_back(e.what());
    }
  };
  check([&] { train.validate(); });
  check([&] { synth.validate(); });
  if (synth.vocab_size != train.model.text_vocab)
    errors.push_back("data.vocab_size (" + std::to_string(synth.vocab_size) + ") != model.text_vocab (" +
                     std::to_string(train.model.text_vocab) + ")");
  if (synth.feature_dim * synth.stride != train.model.input_dim)
    errors.push_back("model.input_dim must equal data.feature_dim x data.stride (" +
                     std::to_string(synth.feature_dim * synth.stride) + ")");
  if (train_count < 1 || dev_count < 1 || test_count < 1) errors.push_back("data split counts must be >= 1");
  if (beam < 1) errors.push_back("decode.beam must be >= 1");
  if (threads < 1) errors.push_back("decode.threads must be >= 1");
  if (split != "train" && split != "dev" && split != "test") errors.push_back("decode.split must be train, dev or test");
  for (int m : concat)
    if (m < 1) errors.push_back("eval.concat multipliers must be >= 1");
  if (gap_frames < 0) errors.push_back("eval.gap_frames must be >= 0");
  for (auto c : ablate_chunks)
    if (c < 1) errors.push_back("ablate.chunks must be >= 1");
  for (int m : bench_lengths)
    if (m < 1) errors.push_back("bench.lengths must be >= 1");
  if (bench_frames < 1 || bench_frames >= kUnbounded) errors.push_back("bench.frames must be a positive count");
  if (bench_tokens < 0 || bench_tokens >= kUnbounded) errors.push_back("bench.tokens must be a count");
  if (errors.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& e : errors) msg += "\n  " + e;
  throw ConfigError(msg);
}

std::string RunConfig::to_ini() const {
  std::ostringstream os;
  std::string section;
  for (const Field& f : fields()) {
    if (section != f.section) {
      if (!section.empty()) os << '\n';
      section = f.section;
      os << '[' << section << "]\n";
    }
    os << f.key << " = " << f.get(*this) << '\n';
  }
  return os.str();
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const Field& f : fields()) j[f.section][f.key] = f.get(*this);
  return j;
}

RunConfig RunConfig::from_ini(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig c;
  std::vector<std::string> errors;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      errors.push_back("key '" + section + "' outside of a section");
      continue;
    }
    for (const auto& [key, value] : body) {
      const Field* f = find_field(section, key);
      if (!f) {
        errors.push_back("unknown key '" + section + "." + key + "'");
        continue;
      }
      try {
        assign(c, *f, value.data());
      } catch (const ConfigError& e) {
        errors.push_back(e.what());
      }
    }
  }
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::string text;
  try {
    text = binary::read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config '" + path + "': " + e.what());
  }
  return from_ini(text);
}

void RunConfig::set(const std::string& dotted, const std::string& value) {
  const auto dot = dotted.find('.');
  const Field* f = dot == std::string::npos ? nullptr : find_field(dotted.substr(0, dot), dotted.substr(dot + 1));
  if (!f) throw ConfigError("unknown key '" + dotted + "'");
  assign(*this, *f, value);
}

std::string RunConfig::documented_defaults() {
  const RunConfig d;
  std::ostringstream os;
  std::string section;
  for (const Field& f : fields()) {
    if (section != f.section) {
      if (!section.empty()) os << '\n';
      section = f.section;
      os << '[' << section << "]\n";
    }
    os << f.key << " = " << f.get(d) << "  ; " << f.doc << '\n';
  }
  return os.str();
}

}  // namespace chunkasr
