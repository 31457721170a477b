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

#pragma once

// Independent reference implementations used by the unit tests and the
// acceptance runner. Everything here is exhaustive enumeration or plain
// textbook arithmetic, sharing no code with the library under test.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "chunkasr/numcore/tensor.hpp"

namespace chunkasr::oracle {

/// Every label path of length T over C columns, in lexicographic order.
template <typename Fn>
void for_each_path(int frames, int columns, Fn&& fn) {
  std::vector<int> path(static_cast<std::size_t>(frames), 0);
  while (true) {
    fn(path);
    int i = frames - 1;
    while (i >= 0 && ++path[static_cast<std::size_t>(i)] == columns) path[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) return;
  }
}

/// Expanded-lattice states of `path` if it collapses to `targets`:
/// blank before target j is state 2j, target j is state 2j+1.
inline std::optional<std::vector<int>> path_states(const std::vector<int>& path, const std::vector<int>& targets,
                                                   int blank) {
  std::vector<int> states;
  int emitted = 0;  // targets started so far
  int prev = blank;
  for (int label : path) {
    if (label == blank) {
      states.push_back(2 * emitted);
    } else if (label == prev) {
      states.push_back(2 * emitted - 1);
    } else {
      if (emitted == static_cast<int>(targets.size()) || targets[static_cast<std::size_t>(emitted)] != label)
        return std::nullopt;
      ++emitted;
      states.push_back(2 * emitted - 1);
    }
    prev = label;
  }
  if (emitted != static_cast<int>(targets.size())) return std::nullopt;
  return states;
}

inline double path_score(const Tensor<double>& lp, const std::vector<int>& path) {
  double s = 0.0;
  for (std::size_t t = 0; t < path.size(); ++t) s += lp(static_cast<Index>(t), path[t]);
  return s;
}

/// -log of the summed probability of all paths collapsing to `targets`
/// (+inf when none does).
inline double ctc_nll(const Tensor<double>& lp, const std::vector<int>& targets, int blank) {
  std::vector<double> scores;
  for_each_path(static_cast<int>(lp.rows()), static_cast<int>(lp.cols()), [&](const std::vector<int>& p) {
    if (path_states(p, targets, blank)) scores.push_back(path_score(lp, p));
  });
  if (scores.empty()) return std::numeric_limits<double>::infinity();
  double m = -std::numeric_limits<double>::infinity();
  for (double s : scores) m = std::max(m, s);
  double acc = 0.0;
  for (double s : scores) acc += std::exp(s - m);
  return -(m + std::log(acc));
}

struct BestPath {
  double score = -std::numeric_limits<double>::infinity();
  std::vector<int> path;
  std::vector<int> states;
  std::vector<std::int64_t> end_frames;
};

/// Tie preference between two optimal state sequences, compared from the
/// last frame backwards: ending on the last label beats ending in blank;
/// then at each frame the predecessor that keeps the earlier token's end
/// latest wins (a label before a blank, a token boundary before a blank gap
/// before a repeated label). Tokens end as late as the scores allow.
inline int predecessor_preference(int from, int to) {
  if (to % 2 == 0) return from == to ? 1 : 0;
  if (from == to) return 2;
  return from == to - 2 ? 0 : 1;
}

inline bool prefer(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t T = a.size();
  const int fa = a[T - 1] % 2 == 1 ? 0 : 1, fb = b[T - 1] % 2 == 1 ? 0 : 1;
  if (fa != fb) return fa < fb;
  for (std::size_t t = T - 1; t >= 1; --t) {
    if (a[t - 1] == b[t - 1]) continue;
    return predecessor_preference(a[t - 1], a[t]) < predecessor_preference(b[t - 1], b[t]);
  }
  return false;
}

/// Exhaustive Viterbi with the tie preference above. Scores must compare
/// exactly for ties to be meaningful (use integer-valued log-probs).
inline BestPath best_path(const Tensor<double>& lp, const std::vector<int>& targets, int blank) {
  BestPath best;
  for_each_path(static_cast<int>(lp.rows()), static_cast<int>(lp.cols()), [&](const std::vector<int>& p) {
    auto st = path_states(p, targets, blank);
    if (!st) return;
    const double s = path_score(lp, p);
    if (s > best.score || (s == best.score && prefer(*st, best.states))) {
      best.score = s;
      best.path = p;
      best.states = *st;
    }
  });
  if (best.path.empty()) return best;
  best.end_frames.assign(targets.size(), -1);
  for (std::size_t t = 0; t < best.states.size(); ++t)
    if (best.states[t] % 2 == 1) best.end_frames[static_cast<std::size_t>(best.states[t] / 2)] = static_cast<std::int64_t>(t);
  return best;
}

/// Row-normalized random log-probabilities.
inline Tensor<double> random_logprobs(int frames, int columns, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.5);
  Tensor<double> lp(frames, columns);
  for (int t = 0; t < frames; ++t) {
    double z = 0.0;
    for (int c = 0; c < columns; ++c) z += std::exp(lp(t, c) = n(rng));
    for (int c = 0; c < columns; ++c) lp(t, c) -= std::log(z);
  }
  return lp;
}

/// Integer-valued scores in [-3, 0]: sums are exact, so ties are common and
/// compare exactly.
inline Tensor<double> tied_logprobs(int frames, int columns, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> v(-3, 0);
  Tensor<double> lp(frames, columns);
  for (Index i = 0; i < lp.size(); ++i) lp.data()[i] = v(rng);
  return lp;
}

/// Levenshtein distance between token sequences.
inline std::int64_t edit_distance(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<std::int64_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<std::int64_t>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::int64_t diag = row[0];
    row[0] = static_cast<std::int64_t>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::int64_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

}  // namespace chunkasr::oracle
