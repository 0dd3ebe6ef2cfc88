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

#include "emoxfer/core/nn.h"
#include "gradcheck.h"

namespace emoxfer::nn {
namespace {

using emoxfer::testing::CheckGradients;
using emoxfer::testing::ProjectToScalar;
using emoxfer::testing::RandomMat;

TEST(NnTest, LinearAndConv1dGradients) {
  Rng rng(11);
  Linear lin(4, 3, rng);
  Conv1d conv(3, 5, 3, rng);
  ad::Parameter x(6, 4);
  x.value = RandomMat(6, 4, rng);
  ParamRegistry reg;
  lin.Collect("lin", &reg);
  conv.Collect("conv", &reg);
  reg.Add("x", &x);
  auto r = CheckGradients(reg, [&](Tape& t) {
    return ProjectToScalar(t, conv.Forward(t, ad::Tanh(lin.Forward(t, t.Param(x)))));
  });
  EXPECT_LT(r.max_rel_error, 1e-6) << r.worst;
}

TEST(NnTest, RecurrentGradients) {
  Rng rng(12);
  Gru gru(3, 4, rng);
  Lstm lstm(3, 5, rng);
  ad::Parameter x(5, 3);
  x.value = RandomMat(5, 3, rng);
  ParamRegistry reg;
  gru.Collect("gru", &reg);
  lstm.Collect("lstm", &reg);
  reg.Add("x", &x);
  auto r = CheckGradients(reg, [&](Tape& t) {
    Var xv = t.Param(x);
    Var a = ad::ConcatCols({gru.Final(t, xv, false), gru.Final(t, xv, true)});
    Var b = lstm.Forward(t, xv);
    return ad::Add(ProjectToScalar(t, a, 1), ProjectToScalar(t, b, 2));
  });
  EXPECT_LT(r.max_rel_error, 1e-6) << r.worst;
}

TEST(NnTest, FftBlockGradients) {
  Rng rng(13);
  FftBlock block(8, 2, 12, 3, rng);
  ad::Parameter x(5, 8);
  x.value = RandomMat(5, 8, rng);
  ParamRegistry reg;
  block.Collect("fft", &reg);
  reg.Add("x", &x);
  auto r = CheckGradients(reg, [&](Tape& t) { return ProjectToScalar(t, block.Forward(t, t.Param(x))); });
  EXPECT_LT(r.max_rel_error, 1e-5) << r.worst;
}

TEST(NnTest, ConvNormStageShapesAndGradients) {
  Rng rng(14);
  ConvNormStage stage(2, 3, 2, 2, rng);
  ad::Parameter x(6 * 5, 2);
  x.value = RandomMat(30, 2, rng);
  ParamRegistry reg;
  stage.Collect("stage", &reg);
  reg.Add("x", &x);
  Tape probe(false);
  auto out = stage.Forward(probe, probe.Param(x), 6, 5);
  EXPECT_EQ(out.height, 3);
  EXPECT_EQ(out.width, 3);
  EXPECT_EQ(out.y.rows(), 9);
  EXPECT_EQ(out.y.cols(), 3);
  auto r = CheckGradients(reg, [&](Tape& t) {
    return ProjectToScalar(t, stage.Forward(t, t.Param(x), 6, 5).y);
  });
  EXPECT_LT(r.max_rel_error, 1e-5) << r.worst;
}

TEST(NnTest, SinusoidalPositionsStartWithSinCosPattern) {
  Mat pe = SinusoidalPositions(3, 4);
  EXPECT_DOUBLE_EQ(pe(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(pe(0, 1), 1.0);
  EXPECT_NEAR(pe(1, 0), std::sin(1.0), 1e-15);
  EXPECT_NEAR(pe(1, 2), std::sin(0.01), 1e-15);
}

TEST(NnTest, RegistryKeepsDeclarationOrder) {
  Rng rng(15);
  Linear lin(2, 2, rng);
  ParamRegistry reg;
  lin.Collect("a", &reg);
  ASSERT_EQ(reg.size(), 2u);
  EXPECT_EQ(reg.entries()[0].first, "a.weight");
  EXPECT_EQ(reg.entries()[1].first, "a.bias");
  EXPECT_EQ(reg.NumScalars(), 6u);
}

}  // namespace
}  // namespace emoxfer::nn
