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

#include "chunkasr/evalbench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "chunkasr/errors.hpp"
#include "chunkasr/evalbench/cost.hpp"

namespace chunkasr {

namespace {

std::string cell_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << v.get<double>();
    return os.str();
  }
  return v.dump();
}

}  // namespace

std::string ReportTable::to_text() const {
  std::vector<std::size_t> width(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) width[c] = columns[c].size();
  std::vector<std::vector<std::string>> cells;
  for (const auto& row : rows) {
    std::vector<std::string> line;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      line.push_back(row.contains(columns[c]) ? cell_text(row.at(columns[c])) : "-");
      width[c] = std::max(width[c], line.back().size());
    }
    cells.push_back(std::move(line));
  }
  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) os << "  ";
      os << std::string(width[c] - line[c].size(), ' ') << line[c];
    }
    os << '\n';
  };
  emit(columns);
  for (const auto& line : cells) emit(line);
  return os.str();
}

std::string ReportTable::to_jsonl(const nlohmann::json& config) const {
  std::ostringstream os;
  for (nlohmann::json row : rows) {
    row["config"] = config;
    os << row.dump() << '\n';
  }
  return os.str();
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

CorpusDecode decode_corpus(const Model& model, const std::vector<TrainExample>& data, const DecodeOptions& opts) {
  CorpusDecode out;
  out.results.resize(data.size());
  parallel_for(data.size(), opts.threads,
               [&](std::size_t i) { out.results[i] = decode_utterance(model, data[i].frames, opts.beam); });
  std::vector<TokenSeq> refs, hyps;
  for (std::size_t i = 0; i < data.size(); ++i) {
    refs.push_back(data[i].transcript);
    hyps.push_back(out.results[i].transcript);
    out.max_retained_chunks = std::max(out.max_retained_chunks, out.results[i].stats.max_retained_chunks);
    out.max_chunks = std::max(out.max_chunks, chunk_plan(data[i].frames.rows(), model.config.chunk_frames).num_chunks());
  }
  out.wer = corpus_wer(refs, hyps);
  return out;
}

std::vector<ConcatRow> concat_eval(const Model& model, const std::vector<Utterance>& corpus,
                                   const std::vector<int>& multipliers, const DecodeOptions& opts, int gap_frames,
                                   int stride) {
  std::vector<ConcatRow> rows;
  for (int n : multipliers) {
    if (n < 1) throw ConfigError("concat multipliers must be >= 1");
    std::vector<Utterance> repeated;
    repeated.reserve(corpus.size());
    for (const Utterance& u : corpus) repeated.push_back(repeat_utterance(u, n, gap_frames, stride));
    rows.push_back({n, decode_corpus(model, make_examples(repeated, stride), opts)});
  }
  return rows;
}

namespace {

nlohmann::json wer_fields(const CorpusWer& w) {
  return {{"wer", 100.0 * w.all.wer()},
          {"sub", w.all.substitutions},
          {"del", w.all.deletions},
          {"ins", w.all.insertions},
          {"ref_tokens", w.all.ref_length},
          {"long_wer", 100.0 * w.top_decile.wer()},
          {"long_del", 100.0 * w.top_decile.deletion_rate()}};
}

}  // namespace

ReportTable concat_table(const std::vector<ConcatRow>& rows) {
  ReportTable t;
  t.columns = {"multiplier", "wer", "sub", "del", "ins", "ref_tokens", "long_wer", "long_del", "max_chunks",
               "max_cached_chunks"};
  for (const ConcatRow& r : rows) {
    nlohmann::json j = wer_fields(r.decode.wer);
    j["multiplier"] = r.multiplier;
    j["max_chunks"] = r.decode.max_chunks;
    j["max_cached_chunks"] = r.decode.max_retained_chunks;
    t.rows.push_back(j);
  }
  return t;
}

std::vector<AblationCell> ablation_grid(const std::vector<TrainExample>& train, const std::vector<TrainExample>& dev,
                                        const TrainConfig& base, const std::vector<std::int64_t>& chunk_sizes,
                                        const std::vector<std::int64_t>& context_sizes, const DecodeOptions& opts,
                                        const ModelSource& source) {
  const ModelSource train_fn =
      source ? source : ModelSource([&](const TrainConfig& cfg) { return train_loop(train, dev, cfg).best.model; });
  std::vector<AblationCell> cells;
  std::int64_t max_frames = 1;
  for (const TrainExample& ex : dev) max_frames = std::max<std::int64_t>(max_frames, ex.frames.rows());
  for (std::int64_t c : chunk_sizes)
    for (std::int64_t b : context_sizes) {
      TrainConfig cfg = base;
      cfg.model.chunk_frames = c;
      cfg.model.context_chunks = b;
      const Model model = train_fn(cfg);
      AblationCell cell{c, b, decode_corpus(model, dev, opts).wer, 0.0};
      std::int64_t tokens = 0, frames = 0;
      for (const TrainExample& ex : dev) {
        tokens += static_cast<std::int64_t>(ex.transcript.size());
        frames += ex.frames.rows();
      }
      // Cost at the longest dev length with the corpus token rate.
      const std::int64_t u = dev.empty() ? 0 : tokens * max_frames / std::max<std::int64_t>(frames, 1);
      cell.marginal_pairs_per_token = attention_cost(max_frames, u, c, b).marginal_pairs_per_token;
      cells.push_back(cell);
    }
  return cells;
}

ReportTable ablation_table(const std::vector<AblationCell>& cells) {
  ReportTable t;
  t.columns = {"chunk_frames", "context_chunks", "wer", "sub", "del", "ins",
               "long_wer", "pairs_per_token"};
  for (const AblationCell& c : cells) {
    nlohmann::json j = wer_fields(c.wer);
    j["chunk_frames"] = format_count(c.chunk_frames);
    j["context_chunks"] = format_count(c.context_chunks);
    j["pairs_per_token"] = c.marginal_pairs_per_token;
    t.rows.push_back(j);
  }
  return t;
}

}  // namespace chunkasr
