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

#ifndef EMOXFER_CORE_NN_H_
#define EMOXFER_CORE_NN_H_

#include <string>
#include <utility>
#include <vector>

#include "emoxfer/core/autodiff.h"
#include "emoxfer/core/rng.h"

// Building blocks shared by every network in the model stack.
namespace emoxfer::nn {

using ad::Parameter;
using ad::Tape;
using ad::Var;

// Ordered (name, parameter) list. The order is the module declaration order
// and is what the optimizer and the checkpoint writer iterate over.
class ParamRegistry {
 public:
  void Add(std::string name, Parameter* p) { entries_.emplace_back(std::move(name), p); }
  const std::vector<std::pair<std::string, Parameter*>>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  size_t NumScalars() const;
  void ZeroGrad() const;

 private:
  std::vector<std::pair<std::string, Parameter*>> entries_;
};

void XavierUniform(Parameter* p, Rng& rng);
void UniformInit(Parameter* p, double limit, Rng& rng);

class Linear {
 public:
  Linear() = default;
  Linear(int in, int out, Rng& rng);
  Var Forward(Tape& tape, Var x) const;
  void Collect(const std::string& prefix, ParamRegistry* reg);
  int in_dim() const { return static_cast<int>(weight_.value.rows()); }
  int out_dim() const { return static_cast<int>(weight_.value.cols()); }

  Parameter& weight() { return weight_; }
  Parameter& bias() { return bias_; }

 private:
  Parameter weight_;  // [in x out]
  Parameter bias_;    // [1 x out]
};

class LayerNorm {
 public:
  LayerNorm() = default;
  explicit LayerNorm(int dim);
  Var Forward(Tape& tape, Var x) const;
  void Collect(const std::string& prefix, ParamRegistry* reg);

 private:
  Parameter gain_;
  Parameter bias_;
};

// Length-preserving 1-D convolution over rows of a [T x in] sequence.
class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(int in, int out, int kernel, Rng& rng, bool use_bias = true);
  Var Forward(Tape& tape, Var x) const;
  void Collect(const std::string& prefix, ParamRegistry* reg);
  int kernel() const { return kernel_; }

  Parameter& weight() { return weight_; }
  Parameter& bias() { return bias_; }

 private:
  int kernel_ = 3;
  bool use_bias_ = true;
  Parameter weight_;  // [kernel*in x out]
  Parameter bias_;    // [1 x out]
};

// 3x3 convolution -> per-position layer norm over channels -> ReLU.
class ConvNormStage {
 public:
  struct Output {
    Var y;
    int height;
    int width;
  };

  ConvNormStage() = default;
  ConvNormStage(int in_ch, int out_ch, int stride_h, int stride_w, Rng& rng);
  // |x| is a [height*width x in_ch] feature map.
  Output Forward(Tape& tape, Var x, int height, int width) const;
  void Collect(const std::string& prefix, ParamRegistry* reg);

 private:
  int stride_h_ = 1;
  int stride_w_ = 1;
  Parameter weight_;  // [9*in x out]
  Parameter bias_;
  LayerNorm norm_;
};

// Single-direction GRU with the reset gate applied after the recurrent
// matmul (r * (W_hn h + b_hn)).
class Gru {
 public:
  Gru() = default;
  Gru(int in, int hidden, Rng& rng);
  // Runs over the rows of |x| (reversed when |reverse|) and returns the
  // final hidden state [1 x hidden].
  Var Final(Tape& tape, Var x, bool reverse) const;
  void Collect(const std::string& prefix, ParamRegistry* reg);
  int hidden() const { return hidden_; }

 private:
  int hidden_ = 0;
  Parameter w_ih_;  // [in x 3H], gate order r, z, n
  Parameter b_ih_;
  Parameter w_hh_;  // [H x 3H]
  Parameter b_hh_;
};

class Lstm {
 public:
  Lstm() = default;
  Lstm(int in, int hidden, Rng& rng);
  // All hidden states [T x hidden].
  Var Forward(Tape& tape, Var x) const;
  void Collect(const std::string& prefix, ParamRegistry* reg);
  int hidden() const { return hidden_; }

 private:
  int hidden_ = 0;
  Parameter w_ih_;  // [in x 4H], gate order i, f, g, o
  Parameter w_hh_;  // [H x 4H]
  Parameter bias_;  // [1 x 4H]
};

class MultiHeadSelfAttention {
 public:
  MultiHeadSelfAttention() = default;
  MultiHeadSelfAttention(int dim, int heads, Rng& rng);
  Var Forward(Tape& tape, Var x) const;
  void Collect(const std::string& prefix, ParamRegistry* reg);

 private:
  int heads_ = 1;
  Linear qkv_;
  Linear out_;
};

// Feed-forward Transformer block: self-attention and a two-layer 1-D
// convolutional feed-forward net, each wrapped in residual + layer norm.
class FftBlock {
 public:
  FftBlock() = default;
  FftBlock(int dim, int heads, int filter, int kernel, Rng& rng);
  Var Forward(Tape& tape, Var x) const;
  void Collect(const std::string& prefix, ParamRegistry* reg);

 private:
  MultiHeadSelfAttention attention_;
  LayerNorm norm1_;
  Conv1d conv1_;
  Conv1d conv2_;
  LayerNorm norm2_;
};

// Standard sinusoidal position table [length x dim].
Mat SinusoidalPositions(int length, int dim);

}  // namespace emoxfer::nn

#endif  // EMOXFER_CORE_NN_H_
