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

// Differentiable primitives over Tape. Each op checks its shape contract
// and throws ShapeError naming the op on violation.

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "chunkasr/numcore/tape.hpp"

namespace chunkasr {

namespace detail {

inline std::string dims(Index r, Index c) { return std::to_string(r) + "x" + std::to_string(c); }

template <typename Scalar>
void require(bool ok, const char* op, const std::string& msg) {
  if (!ok) throw ShapeError(std::string(op) + ": " + msg);
}

template <typename Scalar>
void same_tape(Var<Scalar> a, Var<Scalar> b, const char* op) {
  require<Scalar>(a.tape == b.tape, op, "operands live on different tapes");
}

}  // namespace detail

template <typename Scalar>
Var<Scalar> matmul(Var<Scalar> a, Var<Scalar> b) {
  detail::same_tape(a, b, "matmul");
  detail::require<Scalar>(a.cols() == b.rows(), "matmul",
                          detail::dims(a.rows(), a.cols()) + " * " + detail::dims(b.rows(), b.cols()));
  const int ia = a.id, ib = b.id;
  return a.tape->push(
      "matmul", {ia, ib},
      [ia, ib](Tape<Scalar>& t, int s) { t.mutable_value(s).noalias() = t.value(ia) * t.value(ib); },
      [ia, ib](Tape<Scalar>& t, int s) {
        const auto& g = t.grad(s);
        if (t.needs_grad(ia)) t.grad(ia).noalias() += g * t.value(ib).transpose();
        if (t.needs_grad(ib)) t.grad(ib).noalias() += t.value(ia).transpose() * g;
      });
}

/// a * b^T
template <typename Scalar>
Var<Scalar> matmul_nt(Var<Scalar> a, Var<Scalar> b) {
  detail::same_tape(a, b, "matmul_nt");
  detail::require<Scalar>(a.cols() == b.cols(), "matmul_nt",
                          detail::dims(a.rows(), a.cols()) + " * (" + detail::dims(b.rows(), b.cols()) + ")^T");
  const int ia = a.id, ib = b.id;
  return a.tape->push(
      "matmul_nt", {ia, ib},
      [ia, ib](Tape<Scalar>& t, int s) { t.mutable_value(s).noalias() = t.value(ia) * t.value(ib).transpose(); },
      [ia, ib](Tape<Scalar>& t, int s) {
        const auto& g = t.grad(s);
        if (t.needs_grad(ia)) t.grad(ia).noalias() += g * t.value(ib);
        if (t.needs_grad(ib)) t.grad(ib).noalias() += g.transpose() * t.value(ia);
      });
}

template <typename Scalar>
Var<Scalar> transpose(Var<Scalar> a) {
  const int ia = a.id;
  return a.tape->push(
      "transpose", {ia}, [ia](Tape<Scalar>& t, int s) { t.mutable_value(s) = t.value(ia).transpose(); },
      [ia](Tape<Scalar>& t, int s) { t.grad(ia) += t.grad(s).transpose(); });
}

template <typename Scalar>
Var<Scalar> add(Var<Scalar> a, Var<Scalar> b) {
  detail::same_tape(a, b, "add");
  detail::require<Scalar>(a.rows() == b.rows() && a.cols() == b.cols(), "add",
                          detail::dims(a.rows(), a.cols()) + " + " + detail::dims(b.rows(), b.cols()));
  const int ia = a.id, ib = b.id;
  return a.tape->push(
      "add", {ia, ib}, [ia, ib](Tape<Scalar>& t, int s) { t.mutable_value(s) = t.value(ia) + t.value(ib); },
      [ia, ib](Tape<Scalar>& t, int s) {
        if (t.needs_grad(ia)) t.grad(ia) += t.grad(s);
        if (t.needs_grad(ib)) t.grad(ib) += t.grad(s);
      });
}

template <typename Scalar>
Var<Scalar> sub(Var<Scalar> a, Var<Scalar> b) {
  detail::same_tape(a, b, "sub");
  detail::require<Scalar>(a.rows() == b.rows() && a.cols() == b.cols(), "sub",
                          detail::dims(a.rows(), a.cols()) + " - " + detail::dims(b.rows(), b.cols()));
  const int ia = a.id, ib = b.id;
  return a.tape->push(
      "sub", {ia, ib}, [ia, ib](Tape<Scalar>& t, int s) { t.mutable_value(s) = t.value(ia) - t.value(ib); },
      [ia, ib](Tape<Scalar>& t, int s) {
        if (t.needs_grad(ia)) t.grad(ia) += t.grad(s);
        if (t.needs_grad(ib)) t.grad(ib) -= t.grad(s);
      });
}

/// Element-wise product.
template <typename Scalar>
Var<Scalar> mul(Var<Scalar> a, Var<Scalar> b) {
  detail::same_tape(a, b, "mul");
  detail::require<Scalar>(a.rows() == b.rows() && a.cols() == b.cols(), "mul",
                          detail::dims(a.rows(), a.cols()) + " .* " + detail::dims(b.rows(), b.cols()));
  const int ia = a.id, ib = b.id;
  return a.tape->push(
      "mul", {ia, ib},
      [ia, ib](Tape<Scalar>& t, int s) { t.mutable_value(s) = t.value(ia).cwiseProduct(t.value(ib)); },
      [ia, ib](Tape<Scalar>& t, int s) {
        const auto& g = t.grad(s);
        if (t.needs_grad(ia)) t.grad(ia) += g.cwiseProduct(t.value(ib));
        if (t.needs_grad(ib)) t.grad(ib) += g.cwiseProduct(t.value(ia));
      });
}

template <typename Scalar>
Var<Scalar> scale(Var<Scalar> a, Scalar k) {
  const int ia = a.id;
  return a.tape->push(
      "scale", {ia}, [ia, k](Tape<Scalar>& t, int s) { t.mutable_value(s) = t.value(ia) * k; },
      [ia, k](Tape<Scalar>& t, int s) { t.grad(ia) += t.grad(s) * k; });
}

/// Adds a 1 x n row to every row of an m x n matrix.
template <typename Scalar>
Var<Scalar> add_row(Var<Scalar> a, Var<Scalar> row) {
  detail::same_tape(a, row, "add_row");
  detail::require<Scalar>(row.rows() == 1 && row.cols() == a.cols(), "add_row",
                          detail::dims(a.rows(), a.cols()) + " + row " + detail::dims(row.rows(), row.cols()));
  const int ia = a.id, ir = row.id;
  return a.tape->push(
      "add_row", {ia, ir},
      [ia, ir](Tape<Scalar>& t, int s) { t.mutable_value(s) = t.value(ia).rowwise() + t.value(ir).row(0); },
      [ia, ir](Tape<Scalar>& t, int s) {
        const auto& g = t.grad(s);
        if (t.needs_grad(ia)) t.grad(ia) += g;
        if (t.needs_grad(ir)) t.grad(ir) += g.colwise().sum();
      });
}

/// Multiplies every row of an m x n matrix element-wise by a 1 x n row.
template <typename Scalar>
Var<Scalar> mul_row(Var<Scalar> a, Var<Scalar> row) {
  detail::same_tape(a, row, "mul_row");
  detail::require<Scalar>(row.rows() == 1 && row.cols() == a.cols(), "mul_row",
                          detail::dims(a.rows(), a.cols()) + " .* row " + detail::dims(row.rows(), row.cols()));
  const int ia = a.id, ir = row.id;
  return a.tape->push(
      "mul_row", {ia, ir},
      [ia, ir](Tape<Scalar>& t, int s) {
        t.mutable_value(s) = t.value(ia).array().rowwise() * t.value(ir).row(0).array();
      },
      [ia, ir](Tape<Scalar>& t, int s) {
        const auto& g = t.grad(s);
        if (t.needs_grad(ia)) t.grad(ia).array() += g.array().rowwise() * t.value(ir).row(0).array();
        if (t.needs_grad(ir)) t.grad(ir) += g.cwiseProduct(t.value(ia)).colwise().sum();
      });
}

/// Adds a constant (non-differentiable) matrix, e.g. an attention mask bias.
template <typename Scalar>
Var<Scalar> add_constant(Var<Scalar> a, Tensor<Scalar> c) {
  detail::require<Scalar>(a.rows() == c.rows() && a.cols() == c.cols(), "add_constant",
                          detail::dims(a.rows(), a.cols()) + " + " + detail::dims(c.rows(), c.cols()));
  const int ia = a.id;
  return a.tape->push(
      "add_constant", {ia}, [ia, c = std::move(c)](Tape<Scalar>& t, int s) { t.mutable_value(s) = t.value(ia) + c; },
      [ia](Tape<Scalar>& t, int s) { t.grad(ia) += t.grad(s); });
}

/// Per-row standardization (x - mean) / sqrt(var + eps), without affine.
template <typename Scalar>
Var<Scalar> normalize_rows(Var<Scalar> a, Scalar eps = Scalar(1e-5)) {
  detail::require<Scalar>(a.cols() >= 1, "normalize_rows", "empty rows");
  const int ia = a.id;
  return a.tape->push(
      "normalize_rows", {ia},
      [ia, eps](Tape<Scalar>& t, int s) {
        const auto& x = t.value(ia);
        auto& y = t.mutable_value(s);
        y.resize(x.rows(), x.cols());
        const Scalar n = static_cast<Scalar>(x.cols());
        for (Index r = 0; r < x.rows(); ++r) {
          const Scalar mean = x.row(r).sum() / n;
          const Scalar var = (x.row(r).array() - mean).square().sum() / n;
          y.row(r) = (x.row(r).array() - mean) / std::sqrt(var + eps);
        }
      },
      [ia, eps](Tape<Scalar>& t, int s) {
        const auto& x = t.value(ia);
        const auto& y = t.value(s);
        const auto& g = t.grad(s);
        auto& gx = t.grad(ia);
        const Scalar n = static_cast<Scalar>(x.cols());
        for (Index r = 0; r < x.rows(); ++r) {
          const Scalar mean = x.row(r).sum() / n;
          const Scalar var = (x.row(r).array() - mean).square().sum() / n;
          const Scalar inv = Scalar(1) / std::sqrt(var + eps);
          const Scalar gmean = g.row(r).sum() / n;
          const Scalar gy = g.row(r).dot(y.row(r)) / n;
          gx.row(r).array() += inv * (g.row(r).array() - gmean - y.row(r).array() * gy);
        }
      });
}

template <typename Scalar>
Var<Scalar> layer_norm(Var<Scalar> x, Var<Scalar> gain, Var<Scalar> bias, Scalar eps = Scalar(1e-5)) {
  return add_row(mul_row(normalize_rows(x, eps), gain), bias);
}

template <typename Scalar>
Var<Scalar> softmax_rows(Var<Scalar> a) {
  const int ia = a.id;
  return a.tape->push(
      "softmax_rows", {ia},
      [ia](Tape<Scalar>& t, int s) {
        const auto& x = t.value(ia);
        auto& y = t.mutable_value(s);
        y.resize(x.rows(), x.cols());
        for (Index r = 0; r < x.rows(); ++r) {
          const Scalar m = x.row(r).maxCoeff();
          y.row(r) = (x.row(r).array() - m).exp();
          y.row(r) /= y.row(r).sum();
        }
      },
      [ia](Tape<Scalar>& t, int s) {
        const auto& y = t.value(s);
        const auto& g = t.grad(s);
        auto& gx = t.grad(ia);
        for (Index r = 0; r < y.rows(); ++r) {
          const Scalar dot = g.row(r).dot(y.row(r));
          gx.row(r).array() += y.row(r).array() * (g.row(r).array() - dot);
        }
      });
}

template <typename Scalar>
Var<Scalar> log_softmax_rows(Var<Scalar> a) {
  const int ia = a.id;
  return a.tape->push(
      "log_softmax_rows", {ia},
      [ia](Tape<Scalar>& t, int s) {
        const auto& x = t.value(ia);
        auto& y = t.mutable_value(s);
        y.resize(x.rows(), x.cols());
        for (Index r = 0; r < x.rows(); ++r) {
          const Scalar m = x.row(r).maxCoeff();
          const Scalar lse = m + std::log((x.row(r).array() - m).exp().sum());
          y.row(r) = x.row(r).array() - lse;
        }
      },
      [ia](Tape<Scalar>& t, int s) {
        const auto& y = t.value(s);
        const auto& g = t.grad(s);
        auto& gx = t.grad(ia);
        for (Index r = 0; r < y.rows(); ++r) {
          const Scalar gs = g.row(r).sum();
          gx.row(r).array() += g.row(r).array() - y.row(r).array().exp() * gs;
        }
      });
}

/// GELU, tanh approximation.
template <typename Scalar>
Var<Scalar> gelu(Var<Scalar> a) {
  const int ia = a.id;
  static constexpr double kC = 0.7978845608028654;  // sqrt(2/pi)
  return a.tape->push(
      "gelu", {ia},
      [ia](Tape<Scalar>& t, int s) {
        const auto x = t.value(ia).array();
        const Scalar c = static_cast<Scalar>(kC);
        t.mutable_value(s) = (Scalar(0.5) * x * (Scalar(1) + (c * (x + Scalar(0.044715) * x.cube())).tanh())).matrix();
      },
      [ia](Tape<Scalar>& t, int s) {
        const auto x = t.value(ia).array();
        const Scalar c = static_cast<Scalar>(kC);
        const auto th = (c * (x + Scalar(0.044715) * x.cube())).tanh().eval();
        const auto d = (Scalar(0.5) * (Scalar(1) + th) +
                        Scalar(0.5) * x * (Scalar(1) - th.square()) * c * (Scalar(1) + Scalar(3 * 0.044715) * x.square()))
                           .eval();
        t.grad(ia).array() += t.grad(s).array() * d;
      });
}

/// Rows of `table` selected by `ids`.
template <typename Scalar>
Var<Scalar> embedding(Var<Scalar> table, std::vector<int> ids) {
  for (int id : ids)
    detail::require<Scalar>(id >= 0 && id < table.rows(), "embedding",
                            "id " + std::to_string(id) + " outside table of " + std::to_string(table.rows()) + " rows");
  const int it = table.id;
  auto shared = std::make_shared<const std::vector<int>>(std::move(ids));
  return table.tape->push(
      "embedding", {it},
      [it, shared](Tape<Scalar>& t, int s) {
        const auto& tab = t.value(it);
        auto& y = t.mutable_value(s);
        y.resize(static_cast<Index>(shared->size()), tab.cols());
        for (std::size_t i = 0; i < shared->size(); ++i) y.row(static_cast<Index>(i)) = tab.row((*shared)[i]);
      },
      [it, shared](Tape<Scalar>& t, int s) {
        const auto& g = t.grad(s);
        auto& gt = t.grad(it);
        for (std::size_t i = 0; i < shared->size(); ++i) gt.row((*shared)[i]) += g.row(static_cast<Index>(i));
      });
}

/// Row gather: out.row(i) = a.row(rows[i]). Same rule as embedding; kept as
/// a separate op name for readable shape errors.
template <typename Scalar>
Var<Scalar> gather_rows(Var<Scalar> a, std::vector<int> rows) {
  for (int r : rows)
    detail::require<Scalar>(r >= 0 && r < a.rows(), "gather_rows",
                            "row " + std::to_string(r) + " outside " + std::to_string(a.rows()) + " rows");
  return embedding(a, std::move(rows));
}

template <typename Scalar>
Var<Scalar> concat_rows(std::span<const Var<Scalar>> parts) {
  detail::require<Scalar>(!parts.empty(), "concat_rows", "no operands");
  std::vector<int> ids;
  for (const auto& p : parts) {
    detail::same_tape(parts[0], p, "concat_rows");
    detail::require<Scalar>(p.cols() == parts[0].cols(), "concat_rows",
                            "column mismatch " + std::to_string(p.cols()) + " vs " + std::to_string(parts[0].cols()));
    ids.push_back(p.id);
  }
  return parts[0].tape->push(
      "concat_rows", ids,
      [ids](Tape<Scalar>& t, int s) {
        Index rows = 0;
        for (int i : ids) rows += t.value(i).rows();
        auto& y = t.mutable_value(s);
        y.resize(rows, t.value(ids[0]).cols());
        Index r = 0;
        for (int i : ids) {
          y.middleRows(r, t.value(i).rows()) = t.value(i);
          r += t.value(i).rows();
        }
      },
      [ids](Tape<Scalar>& t, int s) {
        Index r = 0;
        for (int i : ids) {
          const Index n = t.value(i).rows();
          if (t.needs_grad(i)) t.grad(i) += t.grad(s).middleRows(r, n);
          r += n;
        }
      });
}

template <typename Scalar>
Var<Scalar> concat_cols(std::span<const Var<Scalar>> parts) {
  detail::require<Scalar>(!parts.empty(), "concat_cols", "no operands");
  std::vector<int> ids;
  for (const auto& p : parts) {
    detail::same_tape(parts[0], p, "concat_cols");
    detail::require<Scalar>(p.rows() == parts[0].rows(), "concat_cols",
                            "row mismatch " + std::to_string(p.rows()) + " vs " + std::to_string(parts[0].rows()));
    ids.push_back(p.id);
  }
  return parts[0].tape->push(
      "concat_cols", ids,
      [ids](Tape<Scalar>& t, int s) {
        Index cols = 0;
        for (int i : ids) cols += t.value(i).cols();
        auto& y = t.mutable_value(s);
        y.resize(t.value(ids[0]).rows(), cols);
        Index c = 0;
        for (int i : ids) {
          y.middleCols(c, t.value(i).cols()) = t.value(i);
          c += t.value(i).cols();
        }
      },
      [ids](Tape<Scalar>& t, int s) {
        Index c = 0;
        for (int i : ids) {
          const Index n = t.value(i).cols();
          if (t.needs_grad(i)) t.grad(i) += t.grad(s).middleCols(c, n);
          c += n;
        }
      });
}

template <typename Scalar>
Var<Scalar> slice_rows(Var<Scalar> a, Index start, Index count) {
  detail::require<Scalar>(start >= 0 && count >= 0 && start + count <= a.rows(), "slice_rows",
                          "[" + std::to_string(start) + ", +" + std::to_string(count) + ") of " +
                              std::to_string(a.rows()) + " rows");
  const int ia = a.id;
  return a.tape->push(
      "slice_rows", {ia},
      [ia, start, count](Tape<Scalar>& t, int s) { t.mutable_value(s) = t.value(ia).middleRows(start, count); },
      [ia, start, count](Tape<Scalar>& t, int s) { t.grad(ia).middleRows(start, count) += t.grad(s); });
}

template <typename Scalar>
Var<Scalar> slice_cols(Var<Scalar> a, Index start, Index count) {
  detail::require<Scalar>(start >= 0 && count >= 0 && start + count <= a.cols(), "slice_cols",
                          "[" + std::to_string(start) + ", +" + std::to_string(count) + ") of " +
                              std::to_string(a.cols()) + " cols");
  const int ia = a.id;
  return a.tape->push(
      "slice_cols", {ia},
      [ia, start, count](Tape<Scalar>& t, int s) { t.mutable_value(s) = t.value(ia).middleCols(start, count); },
      [ia, start, count](Tape<Scalar>& t, int s) { t.grad(ia).middleCols(start, count) += t.grad(s); });
}

template <typename Scalar>
Var<Scalar> sum(Var<Scalar> a) {
  const int ia = a.id;
  return a.tape->push(
      "sum", {ia},
      [ia](Tape<Scalar>& t, int s) {
        t.mutable_value(s).resize(1, 1);
        t.mutable_value(s)(0, 0) = t.value(ia).sum();
      },
      [ia](Tape<Scalar>& t, int s) { t.grad(ia).array() += t.grad(s)(0, 0); });
}

/// Negative log-likelihood summed over rows: -sum_i logp(i, targets[i]).
/// Rows with target < 0 are not counted. Returns a 1x1 tensor.
template <typename Scalar>
Var<Scalar> nll_gather(Var<Scalar> logp, std::vector<int> targets) {
  detail::require<Scalar>(static_cast<Index>(targets.size()) == logp.rows(), "nll_gather",
                          std::to_string(targets.size()) + " targets for " + std::to_string(logp.rows()) + " rows");
  for (int y : targets)
    detail::require<Scalar>(y < logp.cols(), "nll_gather",
                            "target " + std::to_string(y) + " outside " + std::to_string(logp.cols()) + " classes");
  const int il = logp.id;
  auto shared = std::make_shared<const std::vector<int>>(std::move(targets));
  return logp.tape->push(
      "nll_gather", {il},
      [il, shared](Tape<Scalar>& t, int s) {
        const auto& lp = t.value(il);
        Scalar acc = 0;
        for (std::size_t i = 0; i < shared->size(); ++i)
          if ((*shared)[i] >= 0) acc -= lp(static_cast<Index>(i), (*shared)[i]);
        t.mutable_value(s).resize(1, 1);
        t.mutable_value(s)(0, 0) = acc;
      },
      [il, shared](Tape<Scalar>& t, int s) {
        const Scalar g = t.grad(s)(0, 0);
        auto& gl = t.grad(il);
        for (std::size_t i = 0; i < shared->size(); ++i)
          if ((*shared)[i] >= 0) gl(static_cast<Index>(i), (*shared)[i]) -= g;
      });
}

/// Rotary position encoding applied independently to each head of width
/// `head_dim`: feature pairs (2j, 2j+1) of row i are rotated by angle
/// positions[i] * base^(-2j/head_dim). Attention scores between rotated
/// queries and keys then depend only on position differences.
template <typename Scalar>
Var<Scalar> rotary(Var<Scalar> x, std::vector<std::int64_t> positions, int head_dim, double base = 10000.0) {
  detail::require<Scalar>(head_dim > 0 && head_dim % 2 == 0 && x.cols() % head_dim == 0, "rotary",
                          "width " + std::to_string(x.cols()) + " not divisible into even heads of " +
                              std::to_string(head_dim));
  detail::require<Scalar>(static_cast<Index>(positions.size()) == x.rows(), "rotary",
                          std::to_string(positions.size()) + " positions for " + std::to_string(x.rows()) + " rows");
  const int half = head_dim / 2;
  auto cos_t = std::make_shared<Tensor<Scalar>>(x.rows(), half);
  auto sin_t = std::make_shared<Tensor<Scalar>>(x.rows(), half);
  for (Index r = 0; r < x.rows(); ++r)
    for (int j = 0; j < half; ++j) {
      const double angle = static_cast<double>(positions[static_cast<std::size_t>(r)]) *
                           std::pow(base, -2.0 * j / static_cast<double>(head_dim));
      (*cos_t)(r, j) = static_cast<Scalar>(std::cos(angle));
      (*sin_t)(r, j) = static_cast<Scalar>(std::sin(angle));
    }
  const int ix = x.id;
  auto rotate = [half, head_dim](const Tensor<Scalar>& in, Tensor<Scalar>& out, const Tensor<Scalar>& cs,
                                 const Tensor<Scalar>& sn, Scalar sign) {
    out.resize(in.rows(), in.cols());
    const Index heads = in.cols() / head_dim;
    for (Index r = 0; r < in.rows(); ++r)
      for (Index h = 0; h < heads; ++h)
        for (int j = 0; j < half; ++j) {
          const Index c0 = h * head_dim + 2 * j;
          const Scalar a = in(r, c0), b = in(r, c0 + 1);
          const Scalar co = cs(r, j), si = sign * sn(r, j);
          out(r, c0) = a * co - b * si;
          out(r, c0 + 1) = a * si + b * co;
        }
  };
  return x.tape->push(
      "rotary", {ix},
      [ix, cos_t, sin_t, rotate](Tape<Scalar>& t, int s) {
        rotate(t.value(ix), t.mutable_value(s), *cos_t, *sin_t, Scalar(1));
      },
      [ix, cos_t, sin_t, rotate](Tape<Scalar>& t, int s) {
        Tensor<Scalar> back;
        rotate(t.grad(s), back, *cos_t, *sin_t, Scalar(-1));
        t.grad(ix) += back;
      });
}

template <typename Scalar>
Var<Scalar> operator+(Var<Scalar> a, Var<Scalar> b) {
  return add(a, b);
}
template <typename Scalar>
Var<Scalar> operator-(Var<Scalar> a, Var<Scalar> b) {
  return sub(a, b);
}
template <typename Scalar>
Var<Scalar> operator*(Var<Scalar> a, Scalar k) {
  return scale(a, k);
}

}  // namespace chunkasr
