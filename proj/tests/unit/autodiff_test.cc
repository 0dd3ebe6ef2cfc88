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

#include <gtest/gtest.h>

#include "emoxfer/core/autodiff.h"
#include "emoxfer/core/error.h"
#include "gradcheck.h"

namespace emoxfer {
namespace {

using ad::Parameter;
using ad::Tape;
using ad::Var;
using testing::CheckGradients;
using testing::ProjectToScalar;
using testing::RandomMat;

Parameter MakeParam(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
  Parameter p(r, c);
  p.value = RandomMat(r, c, rng, scale);
  return p;
}

TEST(AutodiffTest, ElementwiseAndMatmulGradients) {
  Rng rng(1);
  Parameter a = MakeParam(4, 3, rng);
  Parameter b = MakeParam(4, 3, rng);
  Parameter w = MakeParam(3, 5, rng);
  Parameter row = MakeParam(1, 5, rng);
  Parameter s = MakeParam(1, 1, rng);
  auto build = [&](Tape& t) {
    Var x = ad::Mul(ad::Add(t.Param(a), ad::Tanh(t.Param(b))), ad::Sigmoid(t.Param(a)));
    Var y = ad::AddRowBroadcast(ad::MatMul(ad::Sub(x, ad::Scale(t.Param(b), 0.3)), t.Param(w)),
                                t.Param(row));
    y = ad::ScaleBy(ad::Exp(ad::Scale(y, 0.2)), t.Param(s));
    y = ad::Add(y, ad::Square(y));
    return ProjectToScalar(t, y);
  };
  auto r = CheckGradients({{"a", &a}, {"b", &b}, {"w", &w}, {"row", &row}, {"s", &s}}, build);
  EXPECT_LT(r.max_rel_error, 1e-5) << r.worst;
}

TEST(AutodiffTest, SoftmaxLayerNormAndNormalizeGradients) {
  Rng rng(2);
  Parameter x = MakeParam(3, 6, rng, 2.0);
  Parameter gain = MakeParam(1, 6, rng);
  Parameter bias = MakeParam(1, 6, rng);
  Parameter other = MakeParam(6, 3, rng);
  auto build = [&](Tape& t) {
    Var ln = ad::LayerNormRows(t.Param(x), t.Param(gain), t.Param(bias));
    Var sm = ad::SoftmaxRows(ln);
    Var ls = ad::LogSoftmaxRows(t.Param(x));
    Var nt = ad::MatMulNT(ad::L2NormalizeRows(t.Param(x)), ad::Transpose(t.Param(other)));
    return ad::Add(ad::Add(ProjectToScalar(t, sm, 3), ProjectToScalar(t, ls, 4)),
                   ProjectToScalar(t, nt, 5));
  };
  auto r = CheckGradients({{"x", &x}, {"gain", &gain}, {"bias", &bias}, {"other", &other}}, build);
  EXPECT_LT(r.max_rel_error, 1e-6) << r.worst;
}

TEST(AutodiffTest, StructuralOpGradients) {
  Rng rng(3);
  Parameter a = MakeParam(5, 4, rng);
  Parameter table = MakeParam(6, 4, rng);
  auto build = [&](Tape& t) {
    Var x = t.Param(a);
    Var parts = ad::ConcatRows({ad::SliceRows(x, 1, 2), ad::GatherRows(t.Param(table), {0, 5, 5})});
    Var cols = ad::ConcatCols({ad::SliceCols(x, 0, 1), ad::SliceCols(x, 2, 2)});
    Var rep = ad::RepeatRows(cols, {1, 0, 3, 2, 1});
    Var conv = ad::Im2Col1d(x, 3);
    Var reshaped = ad::Reshape(conv, 10, 6);
    Var meanrows = ad::MeanRows(parts);
    return ad::Add(ad::Add(ProjectToScalar(t, rep, 1), ProjectToScalar(t, reshaped, 2)),
                   ad::Add(ProjectToScalar(t, meanrows, 3), ad::Mean(ad::Abs(parts))));
  };
  auto r = CheckGradients({{"a", &a}, {"table", &table}}, build);
  EXPECT_LT(r.max_rel_error, 1e-6) << r.worst;
}

TEST(AutodiffTest, Im2Col2dGradientWithStride) {
  Rng rng(4);
  Parameter x = MakeParam(5 * 7, 2, rng);
  ad::Conv2dGeometry g;
  g.height = 5;
  g.width = 7;
  g.stride_h = 2;
  g.stride_w = 2;
  EXPECT_EQ(g.OutHeight(), 3);
  EXPECT_EQ(g.OutWidth(), 4);
  auto build = [&](Tape& t) { return ProjectToScalar(t, ad::Im2Col2d(t.Param(x), g)); };
  auto r = CheckGradients({{"x", &x}}, build);
  EXPECT_LT(r.max_rel_error, 1e-6) << r.worst;
}

TEST(AutodiffTest, Im2Col1dMatchesNaiveConvolution) {
  Rng rng(5);
  Mat x = RandomMat(6, 2, rng);
  Mat w = RandomMat(3 * 2, 1, rng);
  Tape t(false);
  Mat y = ad::MatMul(ad::Im2Col1d(t.Constant(x), 3), t.Constant(w)).value();
  for (int i = 0; i < 6; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 3; ++j) {
      const int src = i + j - 1;
      if (src < 0 || src >= 6) continue;
      for (int c = 0; c < 2; ++c) acc += x(src, c) * w(j * 2 + c, 0);
    }
    EXPECT_NEAR(y(i, 0), acc, 1e-12);
  }
}

TEST(AutodiffTest, GradientReversalFlipsSign) {
  Rng rng(6);
  Parameter x = MakeParam(2, 3, rng);
  Mat plain, reversed;
  for (int pass = 0; pass < 2; ++pass) {
    x.ZeroGrad();
    Tape t;
    Var h = t.Param(x);
    if (pass == 1) h = ad::GradientReversal(h, 1.0);
    t.Backward(ProjectToScalar(t, ad::Tanh(h)));
    (pass == 0 ? plain : reversed) = x.grad;
  }
  EXPECT_TRUE(reversed.isApprox(-plain, 0.0) || (reversed + plain).cwiseAbs().maxCoeff() == 0.0);
}

TEST(AutodiffTest, StraightThroughPassesGradientUnchanged) {
  Parameter soft(1, 3);
  soft.value << 0.1, 0.7, 0.2;
  Mat hard(1, 3);
  hard << 0, 1, 0;
  Mat upstream(1, 3);
  upstream << 0.5, -2.0, 3.25;
  Tape t;
  Var y = ad::StraightThrough(t.Param(soft), hard);
  EXPECT_EQ(y.value(), hard);
  t.Backward(ad::Sum(ad::Mul(y, t.Constant(upstream))));
  EXPECT_EQ(soft.grad, upstream);
}

TEST(AutodiffTest, StopGradientBlocksFlow) {
  Parameter p(1, 2);
  p.value << 1.0, 2.0;
  Tape t;
  Var x = t.Param(p);
  t.Backward(ad::Sum(ad::Add(x, ad::StopGradient(ad::Square(x)))));
  EXPECT_EQ(p.grad(0, 0), 1.0);
  EXPECT_EQ(p.grad(0, 1), 1.0);
}

TEST(AutodiffTest, CrossEntropyOfUniformLogitsIsLogClasses) {
  Tape t(false);
  Var ce = ad::CrossEntropy(t.Constant(Mat::Zero(1, 7)), 3);
  EXPECT_NEAR(ce.scalar(), std::log(7.0), 1e-12);
  EXPECT_THROW(ad::CrossEntropy(t.Constant(Mat::Zero(1, 7)), 7), LabelError);
}

TEST(AutodiffTest, ShapeErrorsAreReported) {
  Tape t(false);
  Var a = t.Constant(Mat::Zero(2, 3));
  Var b = t.Constant(Mat::Zero(3, 2));
  EXPECT_THROW(ad::Add(a, b), ShapeError);
  EXPECT_THROW(ad::MatMul(a, a), ShapeError);
  EXPECT_THROW(ad::SliceRows(a, 1, 5), ShapeError);
}

TEST(AutodiffTest, NoGradTapeRecordsNoClosures) {
  Parameter p(2, 2);
  p.value.setOnes();
  Tape t(false);
  Var y = ad::Sum(ad::Square(t.Param(p)));
  t.Backward(y);
  EXPECT_EQ(p.grad.cwiseAbs().sum(), 0.0);
  EXPECT_EQ(y.scalar(), 4.0);
}

}  // namespace
}  // namespace emoxfer
