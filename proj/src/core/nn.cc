// Copyright (c) 2026 The emoxfer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "emoxfer/core/nn.h"

#include <cmath>

#include "emoxfer/core/error.h"

namespace emoxfer::nn {

size_t ParamRegistry::NumScalars() const {
  size_t n = 0;
  for (const auto& [name, p] : entries_) n += static_cast<size_t>(p->value.size());
  return n;
}

void ParamRegistry::ZeroGrad() const {
  for (const auto& [name, p] : entries_) p->ZeroGrad();
}

void UniformInit(Parameter* p, double limit, Rng& rng) {
  for (Eigen::Index i = 0; i < p->value.size(); ++i) {
    p->value.data()[i] = RoundToFloat(rng.Uniform(-limit, limit));
  }
  p->ZeroGrad();
}

void XavierUniform(Parameter* p, Rng& rng) {
  const double fan = static_cast<double>(p->value.rows() + p->value.cols());
  UniformInit(p, std::sqrt(6.0 / fan), rng);
}

// ---- Linear -------------------------------------------------------------------

Linear::Linear(int in, int out, Rng& rng) : weight_(in, out), bias_(1, out) {
  XavierUniform(&weight_, rng);
}

Var Linear::Forward(Tape& tape, Var x) const {
  return ad::AddRowBroadcast(ad::MatMul(x, tape.Param(weight_)), tape.Param(bias_));
}

void Linear::Collect(const std::string& prefix, ParamRegistry* reg) {
  reg->Add(prefix + ".weight", &weight_);
  reg->Add(prefix + ".bias", &bias_);
}

// ---- LayerNorm ----------------------------------------------------------------

LayerNorm::LayerNorm(int dim) : gain_(1, dim), bias_(1, dim) { gain_.value.setOnes(); }

Var LayerNorm::Forward(Tape& tape, Var x) const {
  return ad::LayerNormRows(x, tape.Param(gain_), tape.Param(bias_));
}

void LayerNorm::Collect(const std::string& prefix, ParamRegistry* reg) {
  reg->Add(prefix + ".gain", &gain_);
  reg->Add(prefix + ".bias", &bias_);
}

// ---- Conv1d -------------------------------------------------------------------

Conv1d::Conv1d(int in, int out, int kernel, Rng& rng, bool use_bias)
    : kernel_(kernel), use_bias_(use_bias), weight_(kernel * in, out), bias_(1, out) {
  if (kernel < 1 || kernel % 2 == 0) throw ParameterError("Conv1d: kernel must be odd");
  UniformInit(&weight_, std::sqrt(6.0 / (kernel * in + out)), rng);
}

Var Conv1d::Forward(Tape& tape, Var x) const {
  Var y = ad::MatMul(ad::Im2Col1d(x, kernel_), tape.Param(weight_));
  if (!use_bias_) return y;
  return ad::AddRowBroadcast(y, tape.Param(bias_));
}

void Conv1d::Collect(const std::string& prefix, ParamRegistry* reg) {
  reg->Add(prefix + ".weight", &weight_);
  if (use_bias_) reg->Add(prefix + ".bias", &bias_);
}

// ---- ConvNormStage ------------------------------------------------------------

ConvNormStage::ConvNormStage(int in_ch, int out_ch, int stride_h, int stride_w, Rng& rng)
    : stride_h_(stride_h),
      stride_w_(stride_w),
      weight_(9 * in_ch, out_ch),
      bias_(1, out_ch),
      norm_(out_ch) {
  UniformInit(&weight_, std::sqrt(6.0 / (9 * in_ch + out_ch)), rng);
}

ConvNormStage::Output ConvNormStage::Forward(Tape& tape, Var x, int height, int width) const {
  ad::Conv2dGeometry geom;
  geom.height = height;
  geom.width = width;
  geom.stride_h = stride_h_;
  geom.stride_w = stride_w_;
  Var y = ad::AddRowBroadcast(ad::MatMul(ad::Im2Col2d(x, geom), tape.Param(weight_)),
                              tape.Param(bias_));
  y = ad::Relu(norm_.Forward(tape, y));
  return {y, geom.OutHeight(), geom.OutWidth()};
}

void ConvNormStage::Collect(const std::string& prefix, ParamRegistry* reg) {
  reg->Add(prefix + ".weight", &weight_);
  reg->Add(prefix + ".bias", &bias_);
  norm_.Collect(prefix + ".norm", reg);
}

// ---- Gru ----------------------------------------------------------------------

Gru::Gru(int in, int hidden, Rng& rng)
    : hidden_(hidden),
      w_ih_(in, 3 * hidden),
      b_ih_(1, 3 * hidden),
      w_hh_(hidden, 3 * hidden),
      b_hh_(1, 3 * hidden) {
  const double limit = 1.0 / std::sqrt(static_cast<double>(hidden));
  UniformInit(&w_ih_, limit, rng);
  UniformInit(&b_ih_, limit, rng);
  UniformInit(&w_hh_, limit, rng);
  UniformInit(&b_hh_, limit, rng);
}

Var Gru::Final(Tape& tape, Var x, bool reverse) const {
  const Eigen::Index steps = x.rows();
  if (steps == 0) throw ShapeError("Gru: empty sequence");
  const int h = hidden_;
  Var xw = ad::AddRowBroadcast(ad::MatMul(x, tape.Param(w_ih_)), tape.Param(b_ih_));
  Var whh = tape.Param(w_hh_);
  Var bhh = tape.Param(b_hh_);
  Var state = tape.Constant(Mat::Zero(1, h));
  for (Eigen::Index s = 0; s < steps; ++s) {
    const Eigen::Index row = reverse ? steps - 1 - s : s;
    Var xt = ad::SliceRows(xw, row, 1);
    Var ht = ad::AddRowBroadcast(ad::MatMul(state, whh), bhh);
    Var r = ad::Sigmoid(ad::Add(ad::SliceCols(xt, 0, h), ad::SliceCols(ht, 0, h)));
    Var z = ad::Sigmoid(ad::Add(ad::SliceCols(xt, h, h), ad::SliceCols(ht, h, h)));
    Var n = ad::Tanh(ad::Add(ad::SliceCols(xt, 2 * h, h), ad::Mul(r, ad::SliceCols(ht, 2 * h, h))));
    // h' = n + z * (h - n)
    state = ad::Add(n, ad::Mul(z, ad::Sub(state, n)));
  }
  return state;
}

void Gru::Collect(const std::string& prefix, ParamRegistry* reg) {
  reg->Add(prefix + ".w_ih", &w_ih_);
  reg->Add(prefix + ".b_ih", &b_ih_);
  reg->Add(prefix + ".w_hh", &w_hh_);
  reg->Add(prefix + ".b_hh", &b_hh_);
}

// ---- Lstm ---------------------------------------------------------------------

Lstm::Lstm(int in, int hidden, Rng& rng)
    : hidden_(hidden), w_ih_(in, 4 * hidden), w_hh_(hidden, 4 * hidden), bias_(1, 4 * hidden) {
  const double limit = 1.0 / std::sqrt(static_cast<double>(hidden));
  UniformInit(&w_ih_, limit, rng);
  UniformInit(&w_hh_, limit, rng);
  bias_.value.setZero();
  bias_.value.block(0, hidden, 1, hidden).setOnes();  // forget gate
}

Var Lstm::Forward(Tape& tape, Var x) const {
  const Eigen::Index steps = x.rows();
  if (steps == 0) throw ShapeError("Lstm: empty sequence");
  const int h = hidden_;
  Var xw = ad::AddRowBroadcast(ad::MatMul(x, tape.Param(w_ih_)), tape.Param(bias_));
  Var whh = tape.Param(w_hh_);
  Var hs = tape.Constant(Mat::Zero(1, h));
  Var cs = tape.Constant(Mat::Zero(1, h));
  std::vector<Var> outputs;
  outputs.reserve(static_cast<size_t>(steps));
  for (Eigen::Index s = 0; s < steps; ++s) {
    Var gates = ad::Add(ad::SliceRows(xw, s, 1), ad::MatMul(hs, whh));
    Var i = ad::Sigmoid(ad::SliceCols(gates, 0, h));
    Var f = ad::Sigmoid(ad::SliceCols(gates, h, h));
    Var g = ad::Tanh(ad::SliceCols(gates, 2 * h, h));
    Var o = ad::Sigmoid(ad::SliceCols(gates, 3 * h, h));
    cs = ad::Add(ad::Mul(f, cs), ad::Mul(i, g));
    hs = ad::Mul(o, ad::Tanh(cs));
    outputs.push_back(hs);
  }
  return ad::ConcatRows(outputs);
}

void Lstm::Collect(const std::string& prefix, ParamRegistry* reg) {
  reg->Add(prefix + ".w_ih", &w_ih_);
  reg->Add(prefix + ".w_hh", &w_hh_);
  reg->Add(prefix + ".bias", &bias_);
}

// ---- attention ----------------------------------------------------------------

MultiHeadSelfAttention::MultiHeadSelfAttention(int dim, int heads, Rng& rng)
    : heads_(heads), qkv_(dim, 3 * dim, rng), out_(dim, dim, rng) {
  if (heads < 1 || dim % heads != 0) {
    throw ParameterError("attention width must be divisible by the head count");
  }
}

Var MultiHeadSelfAttention::Forward(Tape& tape, Var x) const {
  const int dim = static_cast<int>(x.cols());
  const int dk = dim / heads_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  Var qkv = qkv_.Forward(tape, x);
  std::vector<Var> heads;
  heads.reserve(static_cast<size_t>(heads_));
  for (int h = 0; h < heads_; ++h) {
    Var q = ad::SliceCols(qkv, h * dk, dk);
    Var k = ad::SliceCols(qkv, dim + h * dk, dk);
    Var v = ad::SliceCols(qkv, 2 * dim + h * dk, dk);
    Var attn = ad::SoftmaxRows(ad::Scale(ad::MatMulNT(q, k), scale));
    heads.push_back(ad::MatMul(attn, v));
  }
  Var merged = heads.size() == 1 ? heads.front() : ad::ConcatCols(heads);
  return out_.Forward(tape, merged);
}

void MultiHeadSelfAttention::Collect(const std::string& prefix, ParamRegistry* reg) {
  qkv_.Collect(prefix + ".qkv", reg);
  out_.Collect(prefix + ".out", reg);
}

FftBlock::FftBlock(int dim, int heads, int filter, int kernel, Rng& rng)
    : attention_(dim, heads, rng),
      norm1_(dim),
      conv1_(dim, filter, kernel, rng),
      conv2_(filter, dim, kernel, rng),
      norm2_(dim) {}

Var FftBlock::Forward(Tape& tape, Var x) const {
  Var h = norm1_.Forward(tape, ad::Add(x, attention_.Forward(tape, x)));
  Var ff = conv2_.Forward(tape, ad::Relu(conv1_.Forward(tape, h)));
  return norm2_.Forward(tape, ad::Add(h, ff));
}

void FftBlock::Collect(const std::string& prefix, ParamRegistry* reg) {
  attention_.Collect(prefix + ".attn", reg);
  norm1_.Collect(prefix + ".norm1", reg);
  conv1_.Collect(prefix + ".conv1", reg);
  conv2_.Collect(prefix + ".conv2", reg);
  norm2_.Collect(prefix + ".norm2", reg);
}

Mat SinusoidalPositions(int length, int dim) {
  Mat pe(length, dim);
  for (int pos = 0; pos < length; ++pos) {
    for (int i = 0; i < dim; ++i) {
      const double rate = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / dim);
      pe(pos, i) = (i % 2 == 0) ? std::sin(pos * rate) : std::cos(pos * rate);
    }
  }
  return pe;
}

}  // namespace emoxfer::nn
