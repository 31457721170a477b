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

#include "chunkasr/ctcalign/align.hpp"

#include <string>

#include "chunkasr/ctcalign/ctc.hpp"
#include "chunkasr/errors.hpp"

namespace chunkasr {

int transition_rank(int from, int to) {
  if (from == to) return to % 2 == 0 ? 1 : 2;
  if (to % 2 == 0) return 0;      // label -> blank
  return from == to - 2 ? 0 : 1;  // label -> label beats blank -> label
}

namespace {

template <typename Scalar>
AlignmentResult viterbi(const Tensor<Scalar>& lp, const TokenSeq& targets, int blank) {
  if (lp.rows() < 1) throw ShapeError("ctc_forced_align: no frames");
  if (blank < 0 || blank >= lp.cols()) throw ShapeError("ctc_forced_align: blank column outside logprobs");
  for (int y : targets)
    if (y < 0 || y >= lp.cols() || y == blank)
      throw ShapeError("ctc_forced_align: target " + std::to_string(y) + " is not a label column");
  if (!ctc_feasible(lp.rows(), targets))
    throw InfeasibleError("ctc_forced_align: " + std::to_string(targets.size()) + " targets do not fit in " +
                          std::to_string(lp.rows()) + " frames");

  const int T = static_cast<int>(lp.rows());
  const int S = static_cast<int>(2 * targets.size() + 1);
  auto label = [&](int s) { return s % 2 == 0 ? blank : targets[static_cast<std::size_t>((s - 1) / 2)]; };
  std::vector<double> score(static_cast<std::size_t>(T) * S, kLogZero);
  std::vector<int> back(static_cast<std::size_t>(T) * S, -1);
  auto at = [S](int t, int s) { return static_cast<std::size_t>(t) * S + s; };

  score[at(0, 0)] = static_cast<double>(lp(0, blank));
  if (S > 1) score[at(0, 1)] = static_cast<double>(lp(0, label(1)));
  for (int t = 1; t < T; ++t)
    for (int s = 0; s < S; ++s) {
      int preds[3];
      int n = 0;
      // Listed in rank order so the first strictly-best candidate wins ties.
      if (s % 2 == 0) {
        if (s >= 1) preds[n++] = s - 1;
        preds[n++] = s;
      } else {
        if (s >= 3 && label(s) != label(s - 2)) preds[n++] = s - 2;
        preds[n++] = s - 1;
        preds[n++] = s;
      }
      double best = kLogZero;
      int arg = -1;
      for (int i = 0; i < n; ++i) {
        const double v = score[at(t - 1, preds[i])];
        if (v <= kLogZero / 2) continue;
        if (arg < 0 || v > best) {
          best = v;
          arg = preds[i];
        }
      }
      if (arg < 0) continue;
      score[at(t, s)] = best + static_cast<double>(lp(t, label(s)));
      back[at(t, s)] = arg;
    }

  int last = S - 1;
  if (S > 1 && score[at(T - 1, S - 2)] >= score[at(T - 1, S - 1)]) last = S - 2;
  AlignmentResult res;
  res.log_prob = score[at(T - 1, last)];
  res.states.assign(static_cast<std::size_t>(T), 0);
  for (int t = T - 1, s = last; t >= 0; --t) {
    res.states[static_cast<std::size_t>(t)] = s;
    s = back[at(t, s)];
  }
  res.path.reserve(static_cast<std::size_t>(T));
  res.end_frames.assign(targets.size(), -1);
  for (int t = 0; t < T; ++t) {
    const int s = res.states[static_cast<std::size_t>(t)];
    res.path.push_back(label(s));
    if (s % 2 == 1) res.end_frames[static_cast<std::size_t>((s - 1) / 2)] = t;
  }
  return res;
}

}  // namespace

AlignmentResult ctc_forced_align(const Tensor<float>& logprobs, const TokenSeq& targets, int blank) {
  return viterbi(logprobs, targets, blank);
}

AlignmentResult ctc_forced_align(const Tensor<double>& logprobs, const TokenSeq& targets, int blank) {
  return viterbi(logprobs, targets, blank);
}

}  // namespace chunkasr
