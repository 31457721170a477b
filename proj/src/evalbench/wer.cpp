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

#include "chunkasr/evalbench/wer.hpp"

#include <algorithm>
#include <numeric>

#include "chunkasr/errors.hpp"

namespace chunkasr {

double WerReport::wer() const {
  return static_cast<double>(errors()) / static_cast<double>(std::max<std::int64_t>(ref_length, 1));
}

double WerReport::deletion_rate() const {
  return static_cast<double>(deletions) / static_cast<double>(std::max<std::int64_t>(ref_length, 1));
}

WerReport& WerReport::operator+=(const WerReport& o) {
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  ref_length += o.ref_length;
  utterances += o.utterances;
  return *this;
}

WerReport wer(const TokenSeq& ref, const TokenSeq& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  // Cost is (errors, -substitutions), compared lexicographically.
  struct Cost {
    std::int64_t errors = 0;
    std::int64_t subs = 0;
    bool operator<(const Cost& o) const { return errors != o.errors ? errors < o.errors : subs > o.subs; }
  };
  std::vector<Cost> dp((n + 1) * (m + 1));
  auto at = [m](std::size_t i, std::size_t j) { return i * (m + 1) + j; };
  for (std::size_t i = 0; i <= n; ++i) dp[at(i, 0)] = {static_cast<std::int64_t>(i), 0};
  for (std::size_t j = 0; j <= m; ++j) dp[at(0, j)] = {static_cast<std::int64_t>(j), 0};
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      Cost diag = dp[at(i - 1, j - 1)];
      if (ref[i - 1] != hyp[j - 1]) {
        ++diag.errors;
        ++diag.subs;
      }
      Cost del = dp[at(i - 1, j)];
      ++del.errors;
      Cost ins = dp[at(i, j - 1)];
      ++ins.errors;
      dp[at(i, j)] = std::min({diag, del, ins});
    }
  const Cost c = dp[at(n, m)];
  WerReport r;
  r.substitutions = c.subs;
  r.ref_length = static_cast<std::int64_t>(n);
  r.utterances = 1;
  // matches + S + D = n and matches + S + I = m, with S + D + I = errors.
  const std::int64_t d_minus_i = static_cast<std::int64_t>(n) - static_cast<std::int64_t>(m);
  const std::int64_t d_plus_i = c.errors - c.subs;
  r.deletions = (d_plus_i + d_minus_i) / 2;
  r.insertions = (d_plus_i - d_minus_i) / 2;
  return r;
}

CorpusWer corpus_wer(const std::vector<TokenSeq>& refs, const std::vector<TokenSeq>& hyps) {
  if (refs.size() != hyps.size()) throw ShapeError("corpus_wer: reference and hypothesis counts differ");
  CorpusWer out;
  std::vector<WerReport> each;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    each.push_back(wer(refs[i], hyps[i]));
    out.all += each.back();
  }
  if (refs.empty()) return out;
  std::vector<std::size_t> order(refs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return refs[a].size() > refs[b].size(); });
  const std::size_t top = std::max<std::size_t>(1, refs.size() / 10);
  for (std::size_t i = 0; i < top; ++i) out.top_decile += each[order[i]];
  return out;
}

}  // namespace chunkasr
