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

#include "chunkasr/model/params.hpp"

#include <cmath>
#include <random>

namespace chunkasr {

namespace {

class Initializer {
 public:
  Initializer(ParameterSet<float>& out, std::uint64_t seed) : out_(out), rng_(seed) {}

  void linear(const std::string& name, int in, int out, double gain = 1.0) {
    std::normal_distribution<float> normal(0.0f, static_cast<float>(gain / std::sqrt(static_cast<double>(in))));
    Tensor<float> w(in, out);
    for (Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng_);
    out_[name + ".w"] = std::move(w);
    out_[name + ".b"] = Tensor<float>::Zero(1, out);
  }
  void projection(const std::string& name, int in, int out) {
    std::normal_distribution<float> normal(0.0f, static_cast<float>(1.0 / std::sqrt(static_cast<double>(in))));
    Tensor<float> w(in, out);
    for (Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng_);
    out_[name] = std::move(w);
  }
  void norm(const std::string& name, int dim) {
    out_[name + ".g"] = Tensor<float>::Ones(1, dim);
    out_[name + ".b"] = Tensor<float>::Zero(1, dim);
  }
  void table(const std::string& name, int rows, int dim) {
    std::normal_distribution<float> normal(0.0f, 1.0f);
    Tensor<float> w(rows, dim);
    for (Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng_);
    out_[name] = std::move(w);
  }

  void block(const std::string& p, int dim, int ffn, int layers) {
    norm(p + ".ln1", dim);
    projection(p + ".wq", dim, dim);
    projection(p + ".wk", dim, dim);
    projection(p + ".wv", dim, dim);
    const double residual_gain = 1.0 / std::sqrt(2.0 * layers);
    std::normal_distribution<float> normal(0.0f,
                                           static_cast<float>(residual_gain / std::sqrt(static_cast<double>(dim))));
    Tensor<float> wo(dim, dim);
    for (Index i = 0; i < wo.size(); ++i) wo.data()[i] = normal(rng_);
    out_[p + ".wo"] = std::move(wo);
    norm(p + ".ln2", dim);
    linear(p + ".ffn1", dim, ffn);
    linear(p + ".ffn2", ffn, dim, residual_gain);
  }

 private:
  ParameterSet<float>& out_;
  std::mt19937_64 rng_;
};

}  // namespace

Model init_model(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Model m;
  m.config = cfg;
  Initializer init(m.params, seed);
  init.linear("enc.in", cfg.input_dim, cfg.enc_dim);
  for (int l = 0; l < cfg.enc_layers; ++l) init.block("enc.l" + std::to_string(l), cfg.enc_dim, cfg.enc_ffn, cfg.enc_layers);
  init.norm("enc.lnf", cfg.enc_dim);
  init.linear("ctc", cfg.enc_dim, cfg.text_vocab + 1);
  init.linear("dec.proj", cfg.enc_dim, cfg.dec_dim);
  init.table("dec.embed", cfg.text_vocab + 1, cfg.dec_dim);
  for (int l = 0; l < cfg.dec_layers; ++l) init.block("dec.l" + std::to_string(l), cfg.dec_dim, cfg.dec_ffn, cfg.dec_layers);
  init.norm("dec.lnf", cfg.dec_dim);
  init.linear("dec.out", cfg.dec_dim, cfg.text_vocab + 1);
  return m;
}

std::size_t parameter_count(const ParameterSet<float>& params) {
  std::size_t n = 0;
  for (const auto& [name, t] : params) n += static_cast<std::size_t>(t.size());
  return n;
}

}  // namespace chunkasr
