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

#include <cmath>

#include <gtest/gtest.h>

#include "emoxfer/core/error.h"
#include "emoxfer/model/prosody_predictor.h"
#include "gradcheck.h"

namespace emoxfer::model {
namespace {

using emoxfer::testing::CheckGradients;
using emoxfer::testing::ProjectToScalar;
using emoxfer::testing::RandomMat;

TEST(ProsodyPredictorTest, ShapeAndEvalDeterminism) {
  Rng rng(1);
  ProsodyPredictor pred(ModelConfig{}, rng);
  const Mat h = RandomMat(7, 256, rng);
  Rng d1(5), d2(6);
  ad::Tape t1(false), t2(false);
  const Mat a = pred.Forward(t1, t1.Constant(h), d1, false).value();
  const Mat b = pred.Forward(t2, t2.Constant(h), d2, false).value();
  EXPECT_EQ(a.rows(), 7);
  EXPECT_EQ(a.cols(), 3);
  EXPECT_EQ(a, b);
  Rng d3(5);
  ad::Tape t3(false);
  EXPECT_NE(pred.Forward(t3, t3.Constant(h), d3, true).value(), a);
}

TEST(ProsodyPredictorTest, LengthPreservation) {
  ModelConfig cfg;
  cfg.model_dim = 16;
  Rng rng(2);
  ProsodyPredictor pred(cfg, rng);
  for (int n = 1; n <= 64; ++n) {
    ad::Tape t(false);
    EXPECT_EQ(pred.Forward(t, t.Constant(RandomMat(n, 16, rng)), rng, false).rows(), n);
  }
}

TEST(ProsodyPredictorTest, GradientCheck) {
  Rng rng(3);
  ProsodyPredictor pred(ModelConfig{}, rng);
  ad::Parameter h(3, 256);
  h.value = RandomMat(3, 256, rng);
  nn::ParamRegistry reg;
  pred.Collect("pred", &reg);
  reg.Add("h", &h);
  auto r = CheckGradients(reg, [&](ad::Tape& t) {
    Rng unused(0);
    return ProjectToScalar(t, pred.Forward(t, t.Param(h), unused, false));
  }, 8);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
}

TEST(ProsodyLossTest, Examples) {
  ad::Tape t(false);
  Rng rng(4);
  const Mat x = RandomMat(5, 3, rng);
  EXPECT_EQ(ProsodyLoss(t.Constant(x), t.Constant(x)).scalar(), 0.0);
  EXPECT_DOUBLE_EQ(ProsodyLoss(t.Constant(x + Mat::Ones(5, 3)), t.Constant(x)).scalar(), 1.0);
  const Mat r = (Mat(1, 3) << 1, 2, 2).finished();
  EXPECT_DOUBLE_EQ(ProsodyLoss(t.Constant(r), t.Constant(Mat::Zero(1, 3))).scalar(), 3.0);
  EXPECT_THROW(ProsodyLoss(t.Constant(x), t.Constant(Mat::Zero(4, 3))), ShapeError);
}

dsp::SpeakerStats Stats() {
  dsp::SpeakerStats s;
  s.mean = {std::log(180.0), -22.0, std::log(6.0)};
  s.stddev = {0.15, 5.0, 0.4};
  return s;
}

TEST(RealizeProsodyTest, Examples) {
  const dsp::SpeakerStats s = Stats();
  const RealizedProsody zero = RealizeProsody(Mat::Zero(4, 3), s);
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(zero.physical(i, 0), s.mean[0]);
    EXPECT_DOUBLE_EQ(zero.physical(i, 1), s.mean[1]);
    EXPECT_DOUBLE_EQ(zero.physical(i, 2), s.mean[2]);
    EXPECT_EQ(zero.durations[static_cast<size_t>(i)], 6);
  }
  Mat z = Mat::Zero(2, 3);
  z(0, 2) = (std::log(4.0) - s.mean[2]) / s.stddev[2];
  z(1, 2) = -30.0;
  const RealizedProsody r = RealizeProsody(z, s);
  EXPECT_EQ(r.durations[0], 4);
  EXPECT_EQ(r.durations[1], 1);
}

TEST(RealizeProsodyTest, TargetStatsActAffinely) {
  Rng rng(5);
  const Mat z = RandomMat(6, 3, rng, 2.0);
  const dsp::SpeakerStats a = Stats();
  dsp::SpeakerStats b;
  b.mean = {std::log(110.0), -30.0, std::log(8.0)};
  b.stddev = {0.3, 2.5, 0.2};
  const Mat pa = RealizeProsody(z, a).physical;
  const Mat pb = RealizeProsody(z, b).physical;
  for (int d = 0; d < 3; ++d) {
    const double scale = b.stddev[d] / a.stddev[d];
    const double shift = b.mean[d] - scale * a.mean[d];
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(pb(i, d), scale * pa(i, d) + shift, 1e-12);
  }
  for (int rep = 0; rep < 100; ++rep) {
    for (int d : RealizeProsody(RandomMat(5, 3, rng, 50.0), a).durations) EXPECT_GE(d, 1);
  }
}

}  // namespace
}  // namespace emoxfer::model
