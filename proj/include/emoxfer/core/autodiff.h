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

#ifndef EMOXFER_CORE_AUTODIFF_H_
#define EMOXFER_CORE_AUTODIFF_H_

#include <deque>
#include <functional>
#include <initializer_list>
#include <string>
#include <unordered_map>
#include <vector>

#include "emoxfer/core/tensor.h"

namespace emoxfer {
class Rng;
}

// Minimal tape-based reverse-mode differentiation over dense matrices. Every
// network in the library is written against this layer, so the analytic
// gradients can be checked against finite differences in one place.
namespace emoxfer::ad {

// A trainable matrix. Gradients accumulate into |grad| when a tape that
// referenced the parameter runs Backward(); the accumulator is mutable so
// that forward passes can take parameters by const reference.
struct Parameter {
  Parameter() = default;
  Parameter(Eigen::Index rows, Eigen::Index cols)
      : value(Mat::Zero(rows, cols)), grad(Mat::Zero(rows, cols)) {}

  void ZeroGrad() const { grad.setZero(value.rows(), value.cols()); }

  Mat value;
  mutable Mat grad;
};

class Tape;

// Handle to a node on a tape. Cheap to copy; only valid while its tape lives.
class Var {
 public:
  Var() = default;

  const Mat& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }
  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  // Receives the gradient w.r.t. the node output and the output value.
  using BackwardFn = std::function<void(Tape&, const Mat& grad_out, const Mat& out)>;

  // With grad disabled nothing is retained for the backward pass; used for
  // inference and finite-difference probes.
  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool grad_enabled() const { return grad_enabled_; }

  Var Constant(Mat value);
  // Leaf bound to a parameter; repeated calls return the same node.
  Var Param(const Parameter& p);
  // Records an op. |fn| is kept only when some input needs a gradient.
  Var Record(Mat value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var Record(Mat value, const std::vector<Var>& inputs, BackwardFn fn);

  bool NeedsGrad(Var v) const { return nodes_[static_cast<size_t>(v.id_)].needs_grad; }
  // Gradient slot of |v|, zero-initialized on first use. Only call when
  // NeedsGrad(v).
  Mat& GradSlot(Var v);
  void AccumulateGrad(Var v, const Mat& g);

  // Seeds d(loss)/d(loss) = 1 on a 1x1 node and propagates to every
  // reachable node, then adds leaf gradients into their Parameters.
  void Backward(Var loss);
  // Gradient held by a node after Backward(); zeros if none reached it.
  Mat Grad(Var v) const;

  const Mat& ValueOf(int id) const { return nodes_[static_cast<size_t>(id)].value; }
  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Mat value;
    Mat grad;
    bool needs_grad = false;
    bool has_grad = false;
    BackwardFn backward;
    const Parameter* param = nullptr;
  };

  Var Push(Node node);

  bool grad_enabled_;
  std::deque<Node> nodes_;
  std::unordered_map<const Parameter*, int> param_nodes_;
};

// ---- element-wise and algebraic ops -------------------------------------

Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);  // element-wise
Var Scale(Var a, double s);
// a * s where s is a 1x1 node.
Var ScaleBy(Var a, Var s);
Var AddRowBroadcast(Var a, Var row);  // a[r,:] + row[0,:]
Var MatMul(Var a, Var b);
Var MatMulNT(Var a, Var b);  // a * b^T
Var Transpose(Var a);

Var Relu(Var a);
Var Tanh(Var a);
Var Sigmoid(Var a);
Var Exp(Var a);
Var Abs(Var a);
Var Square(Var a);

Var SoftmaxRows(Var a);
Var LogSoftmaxRows(Var a);
// Row-wise layer normalization with learned gain/bias of shape [1 x cols].
Var LayerNormRows(Var x, Var gain, Var bias, double eps = 1e-5);
Var L2NormalizeRows(Var a);

// ---- structural ops ------------------------------------------------------

Var SliceRows(Var a, Eigen::Index start, Eigen::Index count);
Var SliceCols(Var a, Eigen::Index start, Eigen::Index count);
Var ConcatRows(const std::vector<Var>& parts);
Var ConcatCols(const std::vector<Var>& parts);
Var Reshape(Var a, Eigen::Index rows, Eigen::Index cols);  // row-major
// Row i of |a| repeated counts[i] times, in order.
Var RepeatRows(Var a, const std::vector<int>& counts);
Var GatherRows(Var table, const std::vector<int>& ids);
Var Pick(Var a, Eigen::Index row, Eigen::Index col);  // -> 1x1

// [T x C] -> [T x kernel*C] with zero padding that preserves length;
// column block j holds the input shifted by j - kernel/2.
Var Im2Col1d(Var a, int kernel);

struct Conv2dGeometry {
  int height = 0;
  int width = 0;
  int kernel_h = 3;
  int kernel_w = 3;
  int stride_h = 1;
  int stride_w = 1;
  int pad_h = 1;
  int pad_w = 1;
  int OutHeight() const { return (height + 2 * pad_h - kernel_h) / stride_h + 1; }
  int OutWidth() const { return (width + 2 * pad_w - kernel_w) / stride_w + 1; }
};
// Feature map stored as [height*width x channels] (row = h*width + w).
// Output is [out_h*out_w x kernel_h*kernel_w*channels].
Var Im2Col2d(Var a, const Conv2dGeometry& geom);

// ---- reductions and losses ------------------------------------------------

Var Sum(Var a);
Var Mean(Var a);
Var MeanRows(Var a);  // [R x C] -> [1 x C]

// ---- gradient-shaping ops ------------------------------------------------

// Value of |a| with no gradient path.
Var StopGradient(Var a);
// Identity forward; backward multiplies by -scale.
Var GradientReversal(Var a, double scale);
// Forward value |hard|; backward passes the incoming gradient to |soft|
// unchanged (identity Jacobian).
Var StraightThrough(Var soft, const Mat& hard);
// Inverted dropout with a mask drawn from |rng|. Identity when !training.
Var Dropout(Var a, double rate, Rng& rng, bool training);

// -log softmax(logits)[label] for a single row of logits; returns 1x1.
Var CrossEntropy(Var logits, int label);

}  // namespace emoxfer::ad

#endif  // EMOXFER_CORE_AUTODIFF_H_
