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

#include "emoxfer/ser/ser.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "emoxfer/core/error.h"
#include "emoxfer/core/rng.h"
#include "emoxfer/model/emotion_encoder.h"

namespace emoxfer::ser {
namespace {

namespace fs = std::filesystem;
using training::PreparedUtterance;

model::ExtractorConfig SmallExtractor() {
  model::ExtractorConfig c;
  c.channels = {4, 4, 4, 4, 4};
  c.gru_hidden = 8;
  c.hidden_dim = 8;
  return c;
}

// Class k raises a disjoint block of ten bands by |lift| dB over noise.
std::vector<PreparedUtterance> BandClasses(const std::vector<int>& labels, int per_class, double lift,
                                           uint64_t seed) {
  Rng rng(seed);
  std::vector<PreparedUtterance> out;
  for (size_t k = 0; k < labels.size(); ++k) {
    for (int i = 0; i < per_class; ++i) {
      PreparedUtterance u;
      u.id = "u" + std::to_string(k) + "_" + std::to_string(i);
      u.speaker = i % 2 == 0 ? "spk_a" : "spk_b";
      u.label = labels[k];
      u.log_mel = Mat(16, 80);
      for (Eigen::Index r = 0; r < u.log_mel.rows(); ++r) {
        for (Eigen::Index c = 0; c < 80; ++c) u.log_mel(r, c) = -5.0 + rng.Normal(0.0, 1.0);
      }
      u.log_mel.middleCols(static_cast<Eigen::Index>(10 * k + 5), 10).array() += lift;
      out.push_back(std::move(u));
    }
  }
  return out;
}

class SerTrained : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new std::vector<PreparedUtterance>(BandClasses({0, 2, 5}, 20, 4.0, 3));
    SerTrainConfig tc;
    tc.steps = 150;
    tc.learning_rate = 5e-3;
    result_ = new SerTrainResult;
    model_ = TrainSer(*data_, SmallExtractor(), tc, result_).release();
  }
  static void TearDownTestSuite() {
    delete model_;
    delete result_;
    delete data_;
  }
  static std::vector<PreparedUtterance>* data_;
  static SerTrainResult* result_;
  static SerModel* model_;
};

std::vector<PreparedUtterance>* SerTrained::data_ = nullptr;
SerTrainResult* SerTrained::result_ = nullptr;
SerModel* SerTrained::model_ = nullptr;

TEST(SerModelTest, SingleClassIsRejected) {
  auto data = BandClasses({1}, 6, 4.0, 1);
  EXPECT_THROW(TrainSer(data, SmallExtractor(), {}), DataError);
  for (auto& u : data) u.label.reset();
  EXPECT_THROW(TrainSer(data, SmallExtractor(), {}), DataError);
}

TEST(SerModelTest, InitialLossIsLogClassCount) {
  const auto data = BandClasses({0, 1, 2, 3}, 5, 4.0, 2);
  SerTrainConfig tc;
  tc.steps = 0;
  SerTrainResult res;
  TrainSer(data, SmallExtractor(), tc, &res);
  EXPECT_NEAR(res.initial_loss, std::log(4.0), 1e-9);
  EXPECT_EQ(res.train_count + res.heldout_count, 20);
  EXPECT_EQ(res.heldout_count, 4);  // one per class
}

TEST(SerModelTest, HeldOutSplitIsStratifiedAndSeeded) {
  const auto data = BandClasses({0, 1}, 10, 4.0, 2);
  SerTrainConfig tc;
  tc.steps = 0;
  SerTrainResult a, b;
  TrainSer(data, SmallExtractor(), tc, &a);
  TrainSer(data, SmallExtractor(), tc, &b);
  EXPECT_EQ(a.heldout_count, 4);
  EXPECT_EQ(a.initial_loss, b.initial_loss);
}

TEST_F(SerTrained, SeparableClassesReachHighHeldOutAccuracy) {
  EXPECT_GE(result_->heldout_accuracy, 0.95);
  EXPECT_LT(result_->final_loss, result_->initial_loss);
}

TEST_F(SerTrained, ClassesFollowSortedLabels) {
  EXPECT_EQ(model_->class_labels(), (std::vector<int>{0, 2, 5}));
  EXPECT_EQ(model_->ClassOf(2), 1);
  EXPECT_EQ(model_->ClassOf(3), -1);
}

TEST_F(SerTrained, PosteriorSumsToOneAndMatchesBaseE) {
  for (const auto& u : *data_) {
    const Vec p = model_->Posterior(u.log_mel);
    EXPECT_NEAR(p.sum(), 1.0, 1e-9);
    const Vec q = model::ModifiedSoftmax(model_->Logits(u.log_mel), std::numbers::e);
    EXPECT_LT((p - q).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST_F(SerTrained, ArgmaxStableUnderLogitShift) {
  const Vec z = model_->Logits((*data_)[0].log_mel);
  Eigen::Index a, b;
  model::SoftmaxPosterior(z).maxCoeff(&a);
  model::SoftmaxPosterior((z.array() + 37.5).matrix()).maxCoeff(&b);
  EXPECT_EQ(a, b);
}

TEST_F(SerTrained, IntensityIsMonotoneInAlphaAtPredictedClass) {
  for (const auto& u : *data_) {
    const Vec z = model_->Logits(u.log_mel);
    Eigen::Index k;
    z.maxCoeff(&k);
    double prev = 0.0;
    for (double alpha : {1.01, 1.2, 2.0}) {
      const double v = model::ModifiedSoftmax(z, alpha)(k);
      EXPECT_GT(v, prev);
      prev = v;
    }
  }
}

TEST_F(SerTrained, NearUnitAlphaConcentratesAtUniform) {
  const IntensityReport rep = IntensitySweep(*model_, *data_, {1.01}, 20);
  // With |z_i - z_j| bounded by D, int lies within 1/n * 1.01^(+-D).
  const double center = 1.0 / 3.0;
  for (const auto& u : *data_) {
    const Vec z = model_->Logits(u.log_mel);
    Eigen::Index k;
    z.maxCoeff(&k);
    EXPECT_NEAR(model::ModifiedSoftmax(z, 1.01)(k), center, 0.05);
  }
  int near = 0;
  for (size_t c = 0; c < 3; ++c) {
    for (int b = 0; b < 20; ++b) {
      const double lo = b / 20.0, hi = (b + 1) / 20.0;
      if (hi > center - 0.05 && lo < center + 0.05) near += rep.counts[0][c][static_cast<size_t>(b)];
    }
  }
  EXPECT_EQ(near, rep.Mass(0));
}

TEST_F(SerTrained, ConfidentModelSaturatesAtAlphaTwo) {
  const IntensityReport rep = IntensitySweep(*model_, *data_, {2.0}, 20);
  std::vector<int> pooled(20, 0);
  for (const auto& per_class : rep.counts[0]) {
    for (int b = 0; b < 20; ++b) pooled[static_cast<size_t>(b)] += per_class[static_cast<size_t>(b)];
  }
  EXPECT_EQ(std::max_element(pooled.begin(), pooled.end()) - pooled.begin(), 19);
}

TEST_F(SerTrained, HistogramMassIsUtteranceCountAndOrderFree) {
  const IntensityReport rep = IntensitySweep(*model_, *data_);
  ASSERT_EQ(rep.alphas.size(), 3u);
  for (size_t a = 0; a < 3; ++a) EXPECT_EQ(rep.Mass(a), static_cast<int>(data_->size()));
  std::vector<PreparedUtterance> reversed(data_->rbegin(), data_->rend());
  EXPECT_EQ(IntensitySweep(*model_, reversed).counts, rep.counts);
}

TEST_F(SerTrained, IntensityReportRoundTrips) {
  const IntensityReport rep = IntensitySweep(*model_, *data_);
  const fs::path path = fs::temp_directory_path() / "emoxfer_ser_intensity.tsv";
  rep.Save(path.string());
  const IntensityReport back = IntensityReport::Load(path.string());
  EXPECT_EQ(back.alphas, rep.alphas);
  EXPECT_EQ(back.class_labels, rep.class_labels);
  EXPECT_EQ(back.counts, rep.counts);
  fs::remove(path);
}

TEST_F(SerTrained, LabelReportRowsSumToHundred) {
  const LabelReport rep = MakeLabelReport(*model_, *data_);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_EQ(rep.rows[0].speaker, "spk_a");
  for (const auto& r : rep.rows) {
    double total = 0.0;
    for (double p : r.percent) total += p;
    EXPECT_NEAR(total, 100.0, 0.1);
  }
  EXPECT_TRUE(rep.warnings.empty());
}

TEST_F(SerTrained, EmptySpeakerIsOmittedWithWarning) {
  const LabelReport rep = MakeLabelReport(*model_, *data_, {"spk_b", "ghost", "spk_a"});
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_EQ(rep.rows[0].speaker, "spk_b");
  EXPECT_EQ(rep.rows[1].speaker, "spk_a");
  ASSERT_EQ(rep.warnings.size(), 1u);
  EXPECT_NE(rep.warnings[0].find("ghost"), std::string::npos);
}

TEST_F(SerTrained, LabelReportIsDeterministic) {
  const fs::path a = fs::temp_directory_path() / "emoxfer_ser_labels_a.tsv";
  const fs::path b = fs::temp_directory_path() / "emoxfer_ser_labels_b.tsv";
  MakeLabelReport(*model_, *data_).Save(a.string());
  MakeLabelReport(*model_, *data_).Save(b.string());
  std::ifstream ia(a), ib(b);
  std::stringstream sa, sb;
  sa << ia.rdbuf();
  sb << ib.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  fs::remove(a);
  fs::remove(b);
}

TEST_F(SerTrained, HiddenExportHasOneRowPerUtterance) {
  const fs::path m = fs::temp_directory_path() / "emoxfer_ser_hidden.bin";
  const fs::path idx = fs::temp_directory_path() / "emoxfer_ser_hidden.tsv";
  ExportHidden(*model_, *data_, m.string(), idx.string());
  const Mat rows = LoadMatrix(m.string());
  EXPECT_EQ(rows.rows(), static_cast<Eigen::Index>(data_->size()));
  EXPECT_EQ(rows.cols(), 8);
  std::ifstream is(idx);
  std::string first;
  std::getline(is, first);
  EXPECT_EQ(first, "u0_0\tspk_a\t0");

  std::ifstream f1(m, std::ios::binary);
  std::stringstream s1;
  s1 << f1.rdbuf();
  ExportHidden(*model_, *data_, m.string(), idx.string());
  std::ifstream f2(m, std::ios::binary);
  std::stringstream s2;
  s2 << f2.rdbuf();
  EXPECT_EQ(s1.str(), s2.str());
  fs::remove(m);
  fs::remove(idx);
}

TEST_F(SerTrained, SaveLoadPreservesPredictions) {
  const fs::path path = fs::temp_directory_path() / "emoxfer_ser_model.bin";
  model_->Save(path.string());
  const auto back = SerModel::Load(path.string());
  EXPECT_EQ(back->class_labels(), model_->class_labels());
  for (size_t i = 0; i < 5; ++i) {
    const Vec a = model_->Logits((*data_)[i].log_mel);
    const Vec b = back->Logits((*data_)[i].log_mel);
    EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0);
  }
  fs::remove(path);
}

TEST(SerModelTest, LoadRejectsForeignFile) {
  const fs::path path = fs::temp_directory_path() / "emoxfer_ser_bogus.bin";
  std::ofstream(path) << "not a model\n";
  EXPECT_THROW(SerModel::Load(path.string()), ParseError);
  fs::remove(path);
}

}  // namespace
}  // namespace emoxfer::ser
