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

#include "emoxfer/core/autodiff.h"

#include <cmath>
#include <string>

#include "emoxfer/core/error.h"
#include "emoxfer/core/rng.h"

namespace emoxfer::ad {

namespace {

std::string ShapeStr(const Mat& m) {
  return "[" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + "]";
}

void RequireSameShape(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + ShapeStr(a) + " vs " + ShapeStr(b));
  }
}

Tape& TapeOf(Var a) {
  if (!a.valid()) throw Error("operation on an unbound Var");
  return *a.tape();
}

}  // namespace

const Mat& Var::value() const { return tape_->ValueOf(id_); }

Var Tape::Push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Constant(Mat value) {
  Node n;
  n.value = std::move(value);
  return Push(std::move(n));
}

Var Tape::Param(const Parameter& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return Var(this, it->second);
  Node n;
  n.value = p.value;
  n.needs_grad = grad_enabled_;
  n.param = grad_enabled_ ? &p : nullptr;
  Var v = Push(std::move(n));
  param_nodes_.emplace(&p, v.id_);
  return v;
}

Var Tape::Record(Mat value, std::initializer_list<Var> inputs, BackwardFn fn) {
  return Record(std::move(value), std::vector<Var>(inputs), std::move(fn));
}

Var Tape::Record(Mat value, const std::vector<Var>& inputs, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  if (grad_enabled_) {
    for (const Var& in : inputs) {
      if (in.tape_ != this) throw Error("Record: input belongs to another tape");
      if (nodes_[static_cast<size_t>(in.id_)].needs_grad) {
        n.needs_grad = true;
        break;
      }
    }
    if (n.needs_grad) n.backward = std::move(fn);
  }
  return Push(std::move(n));
}

Mat& Tape::GradSlot(Var v) {
  Node& n = nodes_[static_cast<size_t>(v.id_)];
  if (!n.has_grad) {
    n.grad.setZero(n.value.rows(), n.value.cols());
    n.has_grad = true;
  }
  return n.grad;
}

void Tape::AccumulateGrad(Var v, const Mat& g) {
  if (!NeedsGrad(v)) return;
  Node& n = nodes_[static_cast<size_t>(v.id_)];
  if (!n.has_grad) {
    n.grad = g;
    n.has_grad = true;
  } else {
    n.grad += g;
  }
}

void Tape::Backward(Var loss) {
  if (loss.tape_ != this) throw Error("Backward: loss belongs to another tape");
  if (loss.rows() != 1 || loss.cols() != 1) throw ShapeError("Backward: loss must be 1x1");
  if (!grad_enabled_ || !NeedsGrad(loss)) return;
  GradSlot(loss)(0, 0) += 1.0;
  for (int i = loss.id_; i >= 0; --i) {
    Node& n = nodes_[static_cast<size_t>(i)];
    if (!n.has_grad) continue;
    if (n.backward) n.backward(*this, n.grad, n.value);
    if (n.param != nullptr) {
      if (n.param->grad.rows() != n.grad.rows() || n.param->grad.cols() != n.grad.cols()) {
        n.param->grad.setZero(n.grad.rows(), n.grad.cols());
      }
      n.param->grad += n.grad;
    }
  }
}

Mat Tape::Grad(Var v) const {
  const Node& n = nodes_[static_cast<size_t>(v.id_)];
  if (!n.has_grad) return Mat::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

// ---- element-wise and algebraic ops ---------------------------------------

Var Add(Var a, Var b) {
  RequireSameShape(a.value(), b.value(), "Add");
  return TapeOf(a).Record(a.value() + b.value(), {a, b},
                          [a, b](Tape& t, const Mat& g, const Mat&) {
                            t.AccumulateGrad(a, g);
                            t.AccumulateGrad(b, g);
                          });
}

Var Sub(Var a, Var b) {
  RequireSameShape(a.value(), b.value(), "Sub");
  return TapeOf(a).Record(a.value() - b.value(), {a, b},
                          [a, b](Tape& t, const Mat& g, const Mat&) {
                            t.AccumulateGrad(a, g);
                            if (t.NeedsGrad(b)) t.GradSlot(b) -= g;
                          });
}

Var Mul(Var a, Var b) {
  RequireSameShape(a.value(), b.value(), "Mul");
  return TapeOf(a).Record(a.value().cwiseProduct(b.value()), {a, b},
                          [a, b](Tape& t, const Mat& g, const Mat&) {
                            if (t.NeedsGrad(a)) t.GradSlot(a) += g.cwiseProduct(b.value());
                            if (t.NeedsGrad(b)) t.GradSlot(b) += g.cwiseProduct(a.value());
                          });
}

Var Scale(Var a, double s) {
  return TapeOf(a).Record(a.value() * s, {a}, [a, s](Tape& t, const Mat& g, const Mat&) {
    t.GradSlot(a) += g * s;
  });
}

Var ScaleBy(Var a, Var s) {
  if (s.rows() != 1 || s.cols() != 1) throw ShapeError("ScaleBy: scale must be 1x1");
  return TapeOf(a).Record(a.value() * s.scalar(), {a, s},
                          [a, s](Tape& t, const Mat& g, const Mat&) {
                            if (t.NeedsGrad(a)) t.GradSlot(a) += g * s.scalar();
                            if (t.NeedsGrad(s)) {
                              t.GradSlot(s)(0, 0) += g.cwiseProduct(a.value()).sum();
                            }
                          });
}

Var AddRowBroadcast(Var a, Var row) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw ShapeError("AddRowBroadcast: row " + ShapeStr(row.value()) + " for " +
                     ShapeStr(a.value()));
  }
  Mat out = a.value();
  out.rowwise() += row.value().row(0);
  return TapeOf(a).Record(std::move(out), {a, row}, [a, row](Tape& t, const Mat& g, const Mat&) {
    t.AccumulateGrad(a, g);
    if (t.NeedsGrad(row)) t.GradSlot(row) += g.colwise().sum();
  });
}

Var MatMul(Var a, Var b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("MatMul: " + ShapeStr(a.value()) + " * " + ShapeStr(b.value()));
  }
  Mat out = a.value() * b.value();
  return TapeOf(a).Record(std::move(out), {a, b}, [a, b](Tape& t, const Mat& g, const Mat&) {
    if (t.NeedsGrad(a)) t.GradSlot(a).noalias() += g * b.value().transpose();
    if (t.NeedsGrad(b)) t.GradSlot(b).noalias() += a.value().transpose() * g;
  });
}

Var MatMulNT(Var a, Var b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("MatMulNT: " + ShapeStr(a.value()) + " * " + ShapeStr(b.value()) + "^T");
  }
  Mat out = a.value() * b.value().transpose();
  return TapeOf(a).Record(std::move(out), {a, b}, [a, b](Tape& t, const Mat& g, const Mat&) {
    if (t.NeedsGrad(a)) t.GradSlot(a).noalias() += g * b.value();
    if (t.NeedsGrad(b)) t.GradSlot(b).noalias() += g.transpose() * a.value();
  });
}

Var Transpose(Var a) {
  Mat out = a.value().transpose();
  return TapeOf(a).Record(std::move(out), {a}, [a](Tape& t, const Mat& g, const Mat&) {
    t.GradSlot(a) += g.transpose();
  });
}

Var Relu(Var a) {
  Mat out = a.value().cwiseMax(0.0);
  return TapeOf(a).Record(std::move(out), {a}, [a](Tape& t, const Mat& g, const Mat& y) {
    Mat& ga = t.GradSlot(a);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y.data()[i] > 0.0) ga.data()[i] += g.data()[i];
    }
  });
}

Var Tanh(Var a) {
  Mat out = a.value().array().tanh().matrix();
  return TapeOf(a).Record(std::move(out), {a}, [a](Tape& t, const Mat& g, const Mat& y) {
    t.GradSlot(a).array() += g.array() * (1.0 - y.array().square());
  });
}

Var Sigmoid(Var a) {
  Mat out = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  return TapeOf(a).Record(std::move(out), {a}, [a](Tape& t, const Mat& g, const Mat& y) {
    t.GradSlot(a).array() += g.array() * y.array() * (1.0 - y.array());
  });
}

Var Exp(Var a) {
  Mat out = a.value().array().exp().matrix();
  return TapeOf(a).Record(std::move(out), {a}, [a](Tape& t, const Mat& g, const Mat& y) {
    t.GradSlot(a) += g.cwiseProduct(y);
  });
}

Var Abs(Var a) {
  Mat out = a.value().cwiseAbs();
  return TapeOf(a).Record(std::move(out), {a}, [a](Tape& t, const Mat& g, const Mat&) {
    const Mat& x = a.value();
    Mat& ga = t.GradSlot(a);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double v = x.data()[i];
      if (v > 0.0) {
        ga.data()[i] += g.data()[i];
      } else if (v < 0.0) {
        ga.data()[i] -= g.data()[i];
      }
    }
  });
}

Var Square(Var a) {
  Mat out = a.value().array().square().matrix();
  return TapeOf(a).Record(std::move(out), {a}, [a](Tape& t, const Mat& g, const Mat&) {
    t.GradSlot(a) += 2.0 * g.cwiseProduct(a.value());
  });
}

Var SoftmaxRows(Var a) {
  const Mat& x = a.value();
  Mat out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    out.row(r) = (x.row(r).array() - m).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return TapeOf(a).Record(std::move(out), {a}, [a](Tape& t, const Mat& g, const Mat& y) {
    Mat& ga = t.GradSlot(a);
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      const double dot = g.row(r).dot(y.row(r));
      ga.row(r).array() += y.row(r).array() * (g.row(r).array() - dot);
    }
  });
}

Var LogSoftmaxRows(Var a) {
  const Mat& x = a.value();
  Mat out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    const double lse = m + std::log((x.row(r).array() - m).exp().sum());
    out.row(r) = (x.row(r).array() - lse).matrix();
  }
  return TapeOf(a).Record(std::move(out), {a}, [a](Tape& t, const Mat& g, const Mat& y) {
    Mat& ga = t.GradSlot(a);
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      const double gsum = g.row(r).sum();
      ga.row(r).array() += g.row(r).array() - y.row(r).array().exp() * gsum;
    }
  });
}

Var LayerNormRows(Var x, Var gain, Var bias, double eps) {
  const Mat& xv = x.value();
  const Eigen::Index n = xv.cols();
  if (gain.rows() != 1 || gain.cols() != n || bias.rows() != 1 || bias.cols() != n) {
    throw ShapeError("LayerNormRows: gain/bias must be [1 x " + std::to_string(n) + "]");
  }
  Mat xhat(xv.rows(), n);
  Vec inv_std(xv.rows());
  for (Eigen::Index r = 0; r < xv.rows(); ++r) {
    const double mean = xv.row(r).mean();
    const double var = (xv.row(r).array() - mean).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = ((xv.row(r).array() - mean) * inv_std(r)).matrix();
  }
  Mat out = xhat;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    out.row(r) = out.row(r).cwiseProduct(gain.value().row(0)) + bias.value().row(0);
  }
  return TapeOf(x).Record(
      std::move(out), {x, gain, bias},
      [x, gain, bias, xhat = std::move(xhat), inv_std = std::move(inv_std)](
          Tape& t, const Mat& g, const Mat&) {
        if (t.NeedsGrad(bias)) t.GradSlot(bias) += g.colwise().sum();
        if (t.NeedsGrad(gain)) t.GradSlot(gain) += g.cwiseProduct(xhat).colwise().sum();
        if (t.NeedsGrad(x)) {
          Mat& gx = t.GradSlot(x);
          for (Eigen::Index r = 0; r < g.rows(); ++r) {
            const Eigen::RowVectorXd gh = g.row(r).cwiseProduct(gain.value().row(0));
            const double m1 = gh.mean();
            const double m2 = gh.cwiseProduct(xhat.row(r)).mean();
            gx.row(r).array() +=
                inv_std(r) * (gh.array() - m1 - xhat.row(r).array() * m2);
          }
        }
      });
}

Var L2NormalizeRows(Var a) {
  const Mat& x = a.value();
  Vec norms(x.rows());
  Mat out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    norms(r) = std::max(x.row(r).norm(), 1e-12);
    out.row(r) = x.row(r) / norms(r);
  }
  return TapeOf(a).Record(std::move(out), {a},
                          [a, norms = std::move(norms)](Tape& t, const Mat& g, const Mat& y) {
                            Mat& ga = t.GradSlot(a);
                            for (Eigen::Index r = 0; r < y.rows(); ++r) {
                              const double dot = g.row(r).dot(y.row(r));
                              ga.row(r) += (g.row(r) - y.row(r) * dot) / norms(r);
                            }
                          });
}

// ---- structural ops ---------------------------------------------------------

Var SliceRows(Var a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.rows()) {
    throw ShapeError("SliceRows: range out of bounds for " + ShapeStr(a.value()));
  }
  Mat out = a.value().middleRows(start, count);
  return TapeOf(a).Record(std::move(out), {a}, [a, start, count](Tape& t, const Mat& g, const Mat&) {
    t.GradSlot(a).middleRows(start, count) += g;
  });
}

Var SliceCols(Var a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw ShapeError("SliceCols: range out of bounds for " + ShapeStr(a.value()));
  }
  Mat out = a.value().middleCols(start, count);
  return TapeOf(a).Record(std::move(out), {a}, [a, start, count](Tape& t, const Mat& g, const Mat&) {
    t.GradSlot(a).middleCols(start, count) += g;
  });
}

Var ConcatRows(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("ConcatRows: no inputs");
  Eigen::Index rows = 0;
  const Eigen::Index cols = parts.front().cols();
  for (const Var& p : parts) {
    if (p.cols() != cols) throw ShapeError("ConcatRows: column counts differ");
    rows += p.rows();
  }
  Mat out(rows, cols);
  Eigen::Index r = 0;
  for (const Var& p : parts) {
    out.middleRows(r, p.rows()) = p.value();
    r += p.rows();
  }
  return TapeOf(parts.front())
      .Record(std::move(out), parts, [parts](Tape& t, const Mat& g, const Mat&) {
        Eigen::Index r0 = 0;
        for (const Var& p : parts) {
          if (t.NeedsGrad(p)) t.GradSlot(p) += g.middleRows(r0, p.rows());
          r0 += p.rows();
        }
      });
}

Var ConcatCols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("ConcatCols: no inputs");
  Eigen::Index cols = 0;
  const Eigen::Index rows = parts.front().rows();
  for (const Var& p : parts) {
    if (p.rows() != rows) throw ShapeError("ConcatCols: row counts differ");
    cols += p.cols();
  }
  Mat out(rows, cols);
  Eigen::Index c = 0;
  for (const Var& p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    c += p.cols();
  }
  return TapeOf(parts.front())
      .Record(std::move(out), parts, [parts](Tape& t, const Mat& g, const Mat&) {
        Eigen::Index c0 = 0;
        for (const Var& p : parts) {
          if (t.NeedsGrad(p)) t.GradSlot(p) += g.middleCols(c0, p.cols());
          c0 += p.cols();
        }
      });
}

Var Reshape(Var a, Eigen::Index rows, Eigen::Index cols) {
  if (rows * cols != a.value().size()) throw ShapeError("Reshape: element count changes");
  Mat out = Eigen::Map<const Mat>(a.value().data(), rows, cols);
  return TapeOf(a).Record(std::move(out), {a}, [a](Tape& t, const Mat& g, const Mat&) {
    Mat& ga = t.GradSlot(a);
    Eigen::Map<Mat>(ga.data(), g.rows(), g.cols()) += g;
  });
}

Var RepeatRows(Var a, const std::vector<int>& counts) {
  if (static_cast<Eigen::Index>(counts.size()) != a.rows()) {
    throw ShapeError("RepeatRows: one count per row required");
  }
  Eigen::Index total = 0;
  for (int c : counts) {
    if (c < 0) throw ShapeError("RepeatRows: negative count");
    total += c;
  }
  Mat out(total, a.cols());
  Eigen::Index r = 0;
  for (size_t i = 0; i < counts.size(); ++i) {
    for (int k = 0; k < counts[i]; ++k) out.row(r++) = a.value().row(static_cast<Eigen::Index>(i));
  }
  return TapeOf(a).Record(std::move(out), {a}, [a, counts](Tape& t, const Mat& g, const Mat&) {
    Mat& ga = t.GradSlot(a);
    Eigen::Index r0 = 0;
    for (size_t i = 0; i < counts.size(); ++i) {
      for (int k = 0; k < counts[i]; ++k) ga.row(static_cast<Eigen::Index>(i)) += g.row(r0++);
    }
  });
}

Var GatherRows(Var table, const std::vector<int>& ids) {
  Mat out(static_cast<Eigen::Index>(ids.size()), table.cols());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= table.rows()) {
      throw ShapeError("GatherRows: index " + std::to_string(ids[i]) + " out of range");
    }
    out.row(static_cast<Eigen::Index>(i)) = table.value().row(ids[i]);
  }
  return TapeOf(table).Record(std::move(out), {table}, [table, ids](Tape& t, const Mat& g, const Mat&) {
    Mat& gt = t.GradSlot(table);
    for (size_t i = 0; i < ids.size(); ++i) gt.row(ids[i]) += g.row(static_cast<Eigen::Index>(i));
  });
}

Var Pick(Var a, Eigen::Index row, Eigen::Index col) {
  if (row < 0 || row >= a.rows() || col < 0 || col >= a.cols()) {
    throw ShapeError("Pick: index out of range");
  }
  Mat out(1, 1);
  out(0, 0) = a.value()(row, col);
  return TapeOf(a).Record(std::move(out), {a}, [a, row, col](Tape& t, const Mat& g, const Mat&) {
    t.GradSlot(a)(row, col) += g(0, 0);
  });
}

Var Im2Col1d(Var a, int kernel) {
  const Eigen::Index steps = a.rows();
  const Eigen::Index ch = a.cols();
  const int half = kernel / 2;
  Mat out = Mat::Zero(steps, kernel * ch);
  for (Eigen::Index tt = 0; tt < steps; ++tt) {
    for (int j = 0; j < kernel; ++j) {
      const Eigen::Index src = tt + j - half;
      if (src < 0 || src >= steps) continue;
      out.row(tt).segment(j * ch, ch) = a.value().row(src);
    }
  }
  return TapeOf(a).Record(std::move(out), {a}, [a, kernel, half](Tape& t, const Mat& g, const Mat&) {
    Mat& ga = t.GradSlot(a);
    const Eigen::Index n = ga.rows();
    const Eigen::Index c = ga.cols();
    for (Eigen::Index tt = 0; tt < n; ++tt) {
      for (int j = 0; j < kernel; ++j) {
        const Eigen::Index src = tt + j - half;
        if (src < 0 || src >= n) continue;
        ga.row(src) += g.row(tt).segment(j * c, c);
      }
    }
  });
}

Var Im2Col2d(Var a, const Conv2dGeometry& geom) {
  const Eigen::Index ch = a.cols();
  if (a.rows() != static_cast<Eigen::Index>(geom.height) * geom.width) {
    throw ShapeError("Im2Col2d: input rows do not match height*width");
  }
  const int oh = geom.OutHeight();
  const int ow = geom.OutWidth();
  if (oh <= 0 || ow <= 0) throw ShapeError("Im2Col2d: empty output");
  const int kk = geom.kernel_h * geom.kernel_w;
  Mat out = Mat::Zero(static_cast<Eigen::Index>(oh) * ow, kk * ch);
  const Mat& x = a.value();
  for (int y = 0; y < oh; ++y) {
    for (int z = 0; z < ow; ++z) {
      const Eigen::Index orow = static_cast<Eigen::Index>(y) * ow + z;
      for (int i = 0; i < geom.kernel_h; ++i) {
        const int sy = y * geom.stride_h + i - geom.pad_h;
        if (sy < 0 || sy >= geom.height) continue;
        for (int j = 0; j < geom.kernel_w; ++j) {
          const int sz = z * geom.stride_w + j - geom.pad_w;
          if (sz < 0 || sz >= geom.width) continue;
          out.row(orow).segment((i * geom.kernel_w + j) * ch, ch) =
              x.row(static_cast<Eigen::Index>(sy) * geom.width + sz);
        }
      }
    }
  }
  return TapeOf(a).Record(std::move(out), {a}, [a, geom, oh, ow](Tape& t, const Mat& g, const Mat&) {
    Mat& ga = t.GradSlot(a);
    const Eigen::Index c = ga.cols();
    for (int y = 0; y < oh; ++y) {
      for (int z = 0; z < ow; ++z) {
        const Eigen::Index orow = static_cast<Eigen::Index>(y) * ow + z;
        for (int i = 0; i < geom.kernel_h; ++i) {
          const int sy = y * geom.stride_h + i - geom.pad_h;
          if (sy < 0 || sy >= geom.height) continue;
          for (int j = 0; j < geom.kernel_w; ++j) {
            const int sz = z * geom.stride_w + j - geom.pad_w;
            if (sz < 0 || sz >= geom.width) continue;
            ga.row(static_cast<Eigen::Index>(sy) * geom.width + sz) +=
                g.row(orow).segment((i * geom.kernel_w + j) * c, c);
          }
        }
      }
    }
  });
}

// ---- reductions ---------------------------------------------------------------

Var Sum(Var a) {
  Mat out(1, 1);
  out(0, 0) = a.value().sum();
  return TapeOf(a).Record(std::move(out), {a}, [a](Tape& t, const Mat& g, const Mat&) {
    t.GradSlot(a).array() += g(0, 0);
  });
}

Var Mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  if (n == 0) throw ShapeError("Mean: empty input");
  Mat out(1, 1);
  out(0, 0) = a.value().sum() / n;
  return TapeOf(a).Record(std::move(out), {a}, [a, n](Tape& t, const Mat& g, const Mat&) {
    t.GradSlot(a).array() += g(0, 0) / n;
  });
}

Var MeanRows(Var a) {
  const double n = static_cast<double>(a.rows());
  if (n == 0) throw ShapeError("MeanRows: empty input");
  Mat out = a.value().colwise().sum() / n;
  return TapeOf(a).Record(std::move(out), {a}, [a, n](Tape& t, const Mat& g, const Mat&) {
    t.GradSlot(a).rowwise() += g.row(0) / n;
  });
}

// ---- gradient-shaping ops -----------------------------------------------------

Var StopGradient(Var a) { return TapeOf(a).Constant(a.value()); }

Var GradientReversal(Var a, double scale) {
  return TapeOf(a).Record(a.value(), {a}, [a, scale](Tape& t, const Mat& g, const Mat&) {
    t.GradSlot(a) -= scale * g;
  });
}

Var StraightThrough(Var soft, const Mat& hard) {
  RequireSameShape(soft.value(), hard, "StraightThrough");
  return TapeOf(soft).Record(hard, {soft}, [soft](Tape& t, const Mat& g, const Mat&) {
    t.AccumulateGrad(soft, g);
  });
}

Var Dropout(Var a, double rate, Rng& rng, bool training) {
  if (!training || rate <= 0.0) return a;
  if (rate >= 1.0) throw ParameterError("Dropout: rate must be < 1");
  Mat mask(a.rows(), a.cols());
  const double keep = 1.0 - rate;
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng.UniformOpen() < keep ? 1.0 / keep : 0.0;
  }
  return Mul(a, TapeOf(a).Constant(std::move(mask)));
}

Var CrossEntropy(Var logits, int label) {
  if (logits.rows() != 1) throw ShapeError("CrossEntropy: expects a single row of logits");
  if (label < 0 || label >= logits.cols()) throw LabelError("CrossEntropy: label out of range");
  return Scale(Pick(LogSoftmaxRows(logits), 0, label), -1.0);
}

}  // namespace emoxfer::ad
