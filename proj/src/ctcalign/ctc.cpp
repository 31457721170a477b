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

#include "chunkasr/ctcalign/ctc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chunkasr/errors.hpp"

namespace chunkasr {

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b <= kLogZero / 2) return a;
  return a + std::log1p(std::exp(b - a));
}

bool ctc_feasible(std::int64_t frames, const TokenSeq& targets) {
  std::int64_t need = static_cast<std::int64_t>(targets.size());
  for (std::size_t i = 1; i < targets.size(); ++i) need += targets[i] == targets[i - 1];
  return frames >= need;
}

namespace {

struct Lattice {
  std::vector<int> labels;  // label column per expanded state
  std::vector<bool> skip;   // state s may be entered from s-2

  Lattice(const TokenSeq& targets, int blank) {
    const std::size_t n = 2 * targets.size() + 1;
    labels.resize(n);
    skip.assign(n, false);
    for (std::size_t s = 0; s < n; ++s) {
      labels[s] = (s % 2 == 0) ? blank : targets[(s - 1) / 2];
      skip[s] = s % 2 == 1 && s >= 3 && labels[s] != labels[s - 2];
    }
  }
  int size() const { return static_cast<int>(labels.size()); }
};

template <typename Scalar>
void check_inputs(const Tensor<Scalar>& lp, const TokenSeq& targets, int blank, const char* op) {
  if (lp.rows() < 1) throw ShapeError(std::string(op) + ": no frames");
  if (blank < 0 || blank >= lp.cols()) throw ShapeError(std::string(op) + ": blank column outside logprobs");
  for (int y : targets)
    if (y < 0 || y >= lp.cols() || y == blank)
      throw ShapeError(std::string(op) + ": target " + std::to_string(y) + " is not a label column");
  if (!ctc_feasible(lp.rows(), targets))
    throw InfeasibleError(std::string(op) + ": " + std::to_string(targets.size()) + " targets do not fit in " +
                          std::to_string(lp.rows()) + " frames");
}

// alpha[t][s] / beta[t][s], both including the emission at frame t.
template <typename Scalar>
void forward_backward(const Tensor<Scalar>& lp, const Lattice& lat, std::vector<double>& alpha,
                      std::vector<double>& beta) {
  const int T = static_cast<int>(lp.rows());
  const int S = lat.size();
  alpha.assign(static_cast<std::size_t>(T) * S, kLogZero);
  beta.assign(static_cast<std::size_t>(T) * S, kLogZero);
  auto A = [&](int t, int s) -> double& { return alpha[static_cast<std::size_t>(t) * S + s]; };
  auto B = [&](int t, int s) -> double& { return beta[static_cast<std::size_t>(t) * S + s]; };
  auto emit = [&](int t, int s) { return static_cast<double>(lp(t, lat.labels[s])); };

  A(0, 0) = emit(0, 0);
  if (S > 1) A(0, 1) = emit(0, 1);
  for (int t = 1; t < T; ++t)
    for (int s = 0; s < S; ++s) {
      double acc = A(t - 1, s);
      if (s >= 1) acc = log_add(acc, A(t - 1, s - 1));
      if (lat.skip[s]) acc = log_add(acc, A(t - 1, s - 2));
      A(t, s) = acc <= kLogZero / 2 ? kLogZero : acc + emit(t, s);
    }
  B(T - 1, S - 1) = emit(T - 1, S - 1);
  if (S > 1) B(T - 1, S - 2) = emit(T - 1, S - 2);
  for (int t = T - 2; t >= 0; --t)
    for (int s = S - 1; s >= 0; --s) {
      double acc = B(t + 1, s);
      if (s + 1 < S) acc = log_add(acc, B(t + 1, s + 1));
      if (s + 2 < S && lat.skip[s + 2]) acc = log_add(acc, B(t + 1, s + 2));
      B(t, s) = acc <= kLogZero / 2 ? kLogZero : acc + emit(t, s);
    }
}

}  // namespace

template <typename Scalar>
double ctc_logloss(const Tensor<Scalar>& logprobs, const TokenSeq& targets, int blank) {
  check_inputs(logprobs, targets, blank, "ctc_logloss");
  const Lattice lat(targets, blank);
  std::vector<double> alpha, beta;
  forward_backward(logprobs, lat, alpha, beta);
  const int T = static_cast<int>(logprobs.rows());
  const int S = lat.size();
  double total = alpha[static_cast<std::size_t>(T - 1) * S + S - 1];
  if (S > 1) total = log_add(total, alpha[static_cast<std::size_t>(T - 1) * S + S - 2]);
  return -total;
}

template <typename Scalar>
Tensor<Scalar> ctc_logloss_grad(const Tensor<Scalar>& logprobs, const TokenSeq& targets, int blank) {
  check_inputs(logprobs, targets, blank, "ctc_logloss_grad");
  const Lattice lat(targets, blank);
  std::vector<double> alpha, beta;
  forward_backward(logprobs, lat, alpha, beta);
  const int T = static_cast<int>(logprobs.rows());
  const int S = lat.size();
  double total = alpha[static_cast<std::size_t>(T - 1) * S + S - 1];
  if (S > 1) total = log_add(total, alpha[static_cast<std::size_t>(T - 1) * S + S - 2]);
  Tensor<double> grad = Tensor<double>::Zero(logprobs.rows(), logprobs.cols());
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < S; ++s) {
      const std::size_t i = static_cast<std::size_t>(t) * S + s;
      if (alpha[i] <= kLogZero / 2 || beta[i] <= kLogZero / 2) continue;
      const double occ = alpha[i] + beta[i] - static_cast<double>(logprobs(t, lat.labels[s])) - total;
      grad(t, lat.labels[s]) -= std::exp(occ);
    }
  return grad.cast<Scalar>();
}

template <typename Scalar>
Var<Scalar> ctc_loss(Var<Scalar> logprobs, const TokenSeq& targets, int blank) {
  check_inputs(logprobs.value(), targets, blank, "ctc_loss");
  const int il = logprobs.id;
  return logprobs.tape->push(
      "ctc_loss", {il},
      [il, targets, blank](Tape<Scalar>& t, int s) {
        t.mutable_value(s).resize(1, 1);
        t.mutable_value(s)(0, 0) = static_cast<Scalar>(ctc_logloss(t.value(il), targets, blank));
      },
      [il, targets, blank](Tape<Scalar>& t, int s) {
        t.grad(il) += t.grad(s)(0, 0) * ctc_logloss_grad(t.value(il), targets, blank);
      });
}

TokenSeq ctc_collapse(const std::vector<int>& path, int blank) {
  TokenSeq out;
  int prev = -1;
  for (int p : path) {
    if (p != prev && p != blank) out.push_back(p);
    prev = p;
  }
  return out;
}

double brute_force_ctc(const Tensor<double>& logprobs, const TokenSeq& targets, int blank) {
  const int T = static_cast<int>(logprobs.rows());
  const int C = static_cast<int>(logprobs.cols());
  double paths = 1;
  for (int t = 0; t < T; ++t) paths *= C;
  if (paths > 1e6) throw ShapeError("brute_force_ctc: instance has more than 10^6 paths");
  std::vector<int> path(static_cast<std::size_t>(T), 0);
  double total = kLogZero;
  bool any = false;
  for (;;) {
    if (ctc_collapse(path, blank) == targets) {
      double score = 0;
      for (int t = 0; t < T; ++t) score += logprobs(t, path[static_cast<std::size_t>(t)]);
      total = any ? log_add(total, score) : score;
      any = true;
    }
    int t = T - 1;
    while (t >= 0 && ++path[static_cast<std::size_t>(t)] == C) path[static_cast<std::size_t>(t--)] = 0;
    if (t < 0) break;
  }
  return any ? -total : std::numeric_limits<double>::infinity();
}

template double ctc_logloss<float>(const Tensor<float>&, const TokenSeq&, int);
template double ctc_logloss<double>(const Tensor<double>&, const TokenSeq&, int);
template Tensor<float> ctc_logloss_grad<float>(const Tensor<float>&, const TokenSeq&, int);
template Tensor<double> ctc_logloss_grad<double>(const Tensor<double>&, const TokenSeq&, int);
template Var<float> ctc_loss<float>(Var<float>, const TokenSeq&, int);
template Var<double> ctc_loss<double>(Var<double>, const TokenSeq&, int);

}  // namespace chunkasr
