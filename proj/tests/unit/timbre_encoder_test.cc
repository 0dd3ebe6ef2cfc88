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
#include <filesystem>
#include <fstream>
#include <limits>

#include <gtest/gtest.h>

#include "emoxfer/core/error.h"
#include "emoxfer/model/timbre_encoder.h"
#include "gradcheck.h"

namespace emoxfer::model {
namespace {

using emoxfer::testing::CheckGradients;
using emoxfer::testing::ProjectToScalar;
using emoxfer::testing::RandomMat;

TimbreConfig Vq(int groups, int k = 32) {
  TimbreConfig c;
  c.groups = groups;
  c.codebook_size = k;
  return c;
}

Mat UnitRow(Rng& rng, int dim) {
  Mat v(1, dim);
  for (int i = 0; i < dim; ++i) v(0, i) = rng.Normal();
  return v / v.norm();
}

TEST(TimbreLookupTest, RowsAndGradient) {
  Rng rng(1);
  TimbreLookup lookup(3, 8, rng);
  ad::Tape t;
  const Mat r0 = lookup.Forward(t, 0).value();
  EXPECT_EQ(r0, lookup.table().value.row(0));
  EXPECT_EQ(lookup.Forward(t, 0).value(), r0);
  EXPECT_THROW(lookup.Forward(t, 3), LabelError);
  lookup.table().ZeroGrad();
  t.Backward(ProjectToScalar(t, lookup.Forward(t, 1)));
  EXPECT_GT(lookup.table().grad.row(1).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_TRUE(lookup.table().grad.row(0).isZero(0.0));
}

TEST(SpeakerEmbedderTest, UnitNormAndDeterminism) {
  Rng rng(2);
  SpeakerEmbedder emb(80, 16, 256, rng);
  const Mat mel = RandomMat(20, 80, rng);
  ad::Tape t1(false), t2(false);
  const Mat a = emb.Forward(t1, t1.Constant(mel)).value();
  EXPECT_EQ(a.cols(), 256);
  EXPECT_NEAR(a.norm(), 1.0, 1e-6);
  EXPECT_EQ(a, emb.Forward(t2, t2.Constant(mel)).value());
}

TEST(SpeakerEmbedderTest, GradientCheck) {
  Rng rng(3);
  SpeakerEmbedder emb(80, 6, 8, rng);
  nn::ParamRegistry reg;
  emb.Collect("emb", &reg);
  const Mat mel = RandomMat(7, 80, rng);
  auto pre = CheckGradients(reg, [&](ad::Tape& t) { return ProjectToScalar(t, emb.Project(t, t.Constant(mel))); });
  EXPECT_LT(pre.max_rel_error, 1e-4) << pre.worst;
  auto post = CheckGradients(reg, [&](ad::Tape& t) { return ProjectToScalar(t, emb.Forward(t, t.Constant(mel))); });
  EXPECT_LT(post.max_rel_error, 1e-4) << post.worst;
}

TEST(VqTest, CapacityBits) {
  Rng rng(4);
  EXPECT_DOUBLE_EQ(GroupedVq(256, Vq(2), rng).CapacityBits(), 10.0);
  EXPECT_DOUBLE_EQ(GroupedVq(256, Vq(4), rng).CapacityBits(), 20.0);
  EXPECT_DOUBLE_EQ(GroupedVq(256, Vq(8), rng).CapacityBits(), 40.0);
  EXPECT_THROW(GroupedVq(256, Vq(3), rng), ConfigError);
  EXPECT_THROW(ValidateIbGroups(16, 256), ConfigError);
  EXPECT_THROW(ValidateIbGroups(3, 256), ConfigError);
  EXPECT_NO_THROW(ValidateIbGroups(4, 256));
}

TEST(VqTest, AssignmentMatchesBruteForce) {
  Rng rng(5);
  for (int groups : {2, 4, 8}) {
    GroupedVq vq(256, Vq(groups), rng);
    const int w = vq.group_width();
    for (int trial = 0; trial < 1000; ++trial) {
      const Mat v = UnitRow(rng, 256);
      const auto idx = vq.Assign(v);
      for (int g = 0; g < groups; ++g) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 32; ++k) {
          double d = 0.0;
          for (int j = 0; j < w; ++j) {
            const double diff = v(0, g * w + j) - vq.codebook()(k, j);
            d += diff * diff;
          }
          if (d < best_d) {
            best_d = d;
            best = k;
          }
        }
        ASSERT_EQ(idx[static_cast<size_t>(g)], best);
      }
    }
  }
}

TEST(VqTest, FixedPointAndIdempotence) {
  Rng rng(6);
  GroupedVq vq(16, Vq(4, 8), rng);
  const Mat v = vq.Lookup({3, 0, 7, 3});
  ad::Tape t;
  VqOutput out = vq.Quantize(t, t.Constant(v), false);
  EXPECT_EQ(out.quantized.value(), v);
  EXPECT_EQ(out.commitment.scalar(), 0.0);

  const Mat x = UnitRow(rng, 16);
  const Mat q1 = vq.Quantize(t, t.Constant(x), false).quantized.value();
  const Mat q2 = vq.Quantize(t, t.Constant(q1), false).quantized.value();
  EXPECT_EQ(q1, q2);
}

TEST(VqTest, StraightThroughAndCommitment) {
  Rng rng(7);
  GroupedVq vq(16, Vq(4, 8), rng);
  ad::Parameter v(1, 16);
  v.value = UnitRow(rng, 16);
  const Mat g = RandomMat(1, 16, rng);
  v.ZeroGrad();
  ad::Tape t;
  VqOutput out = vq.Quantize(t, t.Param(v), false);
  t.Backward(ad::Sum(ad::Mul(out.quantized, t.Constant(g))));
  EXPECT_EQ(v.grad, g);

  const Mat q = out.quantized.value();
  EXPECT_NEAR(out.commitment.scalar(), 0.25 * (v.value - q).squaredNorm(), 1e-15);
  v.ZeroGrad();
  ad::Tape t2;
  t2.Backward(vq.Quantize(t2, t2.Param(v), false).commitment);
  const Mat expected = 0.5 * (v.value - q);
  EXPECT_LT((v.grad - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(VqTest, EmaConvergesGeometrically) {
  Rng rng(8);
  // One group, so each update sees exactly one assignment.
  GroupedVq single(4, [] { TimbreConfig c; c.groups = 1; c.codebook_size = 4; return c; }(), rng);
  const Mat target = single.codebook().row(2) + 0.01 * Mat::Ones(1, 4);
  double prev_gap = (single.codebook().row(2) - target).norm();
  for (int step = 0; step < 50; ++step) {
    ad::Tape t(false);
    const auto out = single.Quantize(t, t.Constant(target), true);
    ASSERT_EQ(out.indices[0], 2);
    single.ApplyEmaUpdate(static_cast<uint64_t>(step));
    const double gap = (single.codebook().row(2) - target).norm();
    EXPECT_NEAR(gap / prev_gap, 0.99, 1e-4);
    EXPECT_TRUE(AllFinite(single.codebook()));
    prev_gap = gap;
  }
}

TEST(VqTest, DeadCodewordsAreReseeded) {
  Rng rng(9);
  TimbreConfig c = Vq(1, 4);
  c.dead_code_steps = 5;
  GroupedVq vq(4, c, rng);
  const Mat x = vq.codebook().row(0);
  for (int step = 0; step < 5; ++step) {
    ad::Tape t(false);
    vq.Quantize(t, t.Constant(x), true);
    vq.ApplyEmaUpdate(static_cast<uint64_t>(step));
  }
  // Every other codeword has been idle for 5 updates and now holds a recent input.
  for (int k = 1; k < 4; ++k) EXPECT_LT((vq.codebook().row(k) - x).norm(), 1e-6) << k;
}

TEST(AverageTimbreTest, Examples) {
  Rng rng(10);
  const Mat e1 = RandomMat(1, 8, rng), e2 = RandomMat(1, 8, rng);
  EXPECT_EQ(AverageTimbre({e1}), e1);
  EXPECT_EQ(AverageTimbre({e1, e1}), e1);
  EXPECT_LT((AverageTimbre({e1, e2}) - 0.5 * (e1 + e2)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(AverageTimbre({}), DataError);
}

TEST(ExternalEmbeddingTest, LoadsRowsByByteOffset) {
  const auto dir = std::filesystem::temp_directory_path() / "emoxfer_embed_test";
  std::filesystem::create_directories(dir);
  Mat rows(2, 4);
  rows << 0.5, -1, 2, 0.25, 3, 4, -5, 6;
  {
    std::ofstream os(dir / "emb.bin", std::ios::binary);
    WriteFloat32LE(os, rows);
  }
  std::ofstream(dir / "emb.idx") << "alice\t0\nbob\t16\n";
  const auto m = LoadExternalEmbeddings((dir / "emb.bin").string(), (dir / "emb.idx").string(), 4);
  EXPECT_EQ(m.at("alice"), Vec(rows.row(0).transpose()));
  EXPECT_EQ(m.at("bob"), Vec(rows.row(1).transpose()));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace emoxfer::model
