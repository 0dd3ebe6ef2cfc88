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

#include <cmath>
#include <filesystem>
#include <sstream>

#include "emoxfer/core/archive.h"
#include "emoxfer/core/error.h"
#include "emoxfer/model/emotion_encoder.h"
#include "emoxfer/training/checkpoint.h"
#include "emoxfer/training/objective.h"
#include "emoxfer/training/optimizer.h"
#include "emoxfer/training/run_config.h"
#include "emoxfer/training/trainer.h"

namespace emoxfer::training {
namespace {

namespace fs = std::filesystem;

RunConfig MicroConfig(model::TimbreMode mode = model::TimbreMode::kLookup) {
  RunConfig c;
  c.seed = 11;
  auto& m = c.model;
  m.vocab_size = 8;
  m.num_speakers = 3;
  m.model_dim = 8;
  m.attention_heads = 2;
  m.ffn_filter = 16;
  m.encoder_blocks = 1;
  m.decoder_blocks = 1;
  m.predictor_layers = 2;
  m.extractor.channels = {2, 2, 2, 2, 2};
  m.extractor.gru_hidden = 4;
  m.extractor.hidden_dim = 4;
  m.timbre.mode = mode;
  m.timbre.lstm_hidden = 4;
  m.timbre.groups = 2;
  m.timbre.codebook_size = 4;
  m.timbre.dead_code_steps = 3;
  m.timbre.recent_buffer = 8;
  c.train.batch_size = 3;
  c.train.max_steps = 100;
  c.train.warmup_steps = 10;
  return c;
}

std::vector<model::TrainingExample> RandomExamples(int count, bool labeled, uint64_t seed) {
  Rng rng(seed);
  std::vector<model::TrainingExample> out;
  for (int i = 0; i < count; ++i) {
    model::TrainingExample ex;
    ex.id = "u" + std::to_string(i);
    const int n = 3 + i % 2;
    for (int k = 0; k < n; ++k) {
      ex.phoneme_ids.push_back(rng.UniformInt(8));
      ex.durations.push_back(2 + rng.UniformInt(3));
    }
    int frames = 0;
    for (int d : ex.durations) frames += d;
    ex.mel = Mat(frames, model::kMelBands);
    for (Eigen::Index j = 0; j < ex.mel.size(); ++j) ex.mel.data()[j] = RoundToFloat(rng.Normal());
    ex.prosody = Mat(n, 3);
    for (Eigen::Index j = 0; j < ex.prosody.size(); ++j) ex.prosody.data()[j] = RoundToFloat(rng.Normal());
    ex.speaker = i % 3;
    if (labeled) ex.label = i % 4;
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<Mat> Grads(const nn::ParamRegistry& reg) {
  std::vector<Mat> g;
  for (const auto& [name, p] : reg.entries()) g.push_back(p->grad);
  return g;
}

std::vector<Mat> Values(const nn::ParamRegistry& reg) {
  std::vector<Mat> v;
  for (const auto& [name, p] : reg.entries()) v.push_back(p->value);
  return v;
}

bool BitwiseEqual(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<size_t>(a.size())) == 0;
}

fs::path TempDir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("emoxfer_training_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// ---- objective ------------------------------------------------------------

TEST(CompositeLossTest, AllZeroPartsGiveZero) {
  const LossBreakdown b = CompositeLoss(Mat::Ones(2, 3), Mat::Ones(2, 3), Mat::Zero(1, 3), Mat::Zero(1, 3), 0, 0, {});
  EXPECT_EQ(b.total, 0.0);
}

TEST(CompositeLossTest, UnitPartsWithDefaultWeights) {
  LossBreakdown b;
  b.l_mel = b.l_pros = b.l_adv_spk = b.l_emo_source = 1.0;
  // Hand sum 1 + 0.8 + 0.01 + 0.5.
  EXPECT_EQ(WeightedTotal(b, LossWeights{}), 2.31);
}

TEST(CompositeLossTest, MaeAndMseAgainstHandValues) {
  Mat pm(2, 2), tm(2, 2), pp(1, 3), tp(1, 3);
  pm << 1, 2, 3, 4;
  tm << 0, 2, 5, 4;  // |diff| = 1 0 2 0 -> MAE 0.75
  pp << 1, 1, 1;
  tp << 0, 1, 3;  // diff^2 = 1 0 4 -> MSE 5/3
  const LossBreakdown b = CompositeLoss(pm, tm, pp, tp, 0.5, 0.25, {});
  EXPECT_DOUBLE_EQ(b.l_mel, 0.75);
  EXPECT_DOUBLE_EQ(b.l_pros, 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(b.total, 0.75 + 0.8 * 5.0 / 3.0 + 0.01 * 0.5 + 0.5 * 0.25);
}

TEST(CompositeLossTest, ShapeMismatchThrows) {
  EXPECT_THROW(CompositeLoss(Mat::Ones(2, 3), Mat::Ones(3, 3), Mat::Zero(1, 3), Mat::Zero(1, 3), 0, 0, {}),
               ShapeError);
  EXPECT_THROW(CompositeLoss(Mat::Ones(2, 3), Mat::Ones(2, 3), Mat::Zero(2, 3), Mat::Zero(1, 3), 0, 0, {}),
               ShapeError);
}

TEST(CompositeLossTest, TotalIsAffineInEachWeight) {
  LossBreakdown b;
  b.l_mel = 0.7;
  b.l_pros = 1.3;
  b.l_adv_spk = 2.1;
  b.l_emo_source = 0.4;
  const LossWeights w{};
  const double base = WeightedTotal(b, w);
  for (int which = 0; which < 3; ++which) {
    for (double delta : {0.5, 1.0, 3.0}) {
      LossWeights v = w;
      double part = 0.0;
      if (which == 0) v.pros += delta, part = b.l_pros;
      if (which == 1) v.adv += delta, part = b.l_adv_spk;
      if (which == 2) v.emo += delta, part = b.l_emo_source;
      EXPECT_NEAR(WeightedTotal(b, v) - base, delta * part, 1e-12);
    }
  }
}

TEST(ScheduleTest, LearningRateAtWarmup) {
  // 256^-0.5 * 4000^-0.5 = 1 / sqrt(1024000).
  EXPECT_NEAR(LearningRate(4000, 4000, 256), 1.0 / std::sqrt(1024000.0), 1e-15);
  EXPECT_NEAR(LearningRate(4000, 4000, 256), 9.882e-4, 5e-8);
}

TEST(ScheduleTest, LearningRateRampsThenDecays) {
  for (int s = 1; s < 4000; s += 37) EXPECT_LT(LearningRate(s, 4000, 256), LearningRate(s + 1, 4000, 256));
  EXPECT_LT(LearningRate(8000, 4000, 256), LearningRate(4000, 4000, 256));
  EXPECT_EQ(LearningRate(10, 4000, 256, 0.0), 0.0);
}

TEST(ScheduleTest, TemperatureEndpointsAndMidpoint) {
  TrainConfig c;
  c.max_steps = 3000;
  const int span = 2400;
  EXPECT_DOUBLE_EQ(GumbelTemperature(0, c), 1.0);
  EXPECT_NEAR(GumbelTemperature(span, c), 0.1, 1e-15);
  EXPECT_NEAR(GumbelTemperature(span / 2, c), std::sqrt(0.1), 1e-12);
  EXPECT_NEAR(GumbelTemperature(3000, c), 0.1, 1e-15);
  for (int s = 0; s < span; s += 100) EXPECT_GT(GumbelTemperature(s, c), GumbelTemperature(s + 100, c));
}

TEST(MedianTest, Examples) {
  EXPECT_EQ(Median({0.2, 0.5, 0.9}), 0.5);
  EXPECT_EQ(Median({0.9, 0.2, 0.5}), 0.5);
  EXPECT_EQ(Median({0.7}), 0.7);
  EXPECT_DOUBLE_EQ(Median({4, 1, 3, 2}), 2.5);
  EXPECT_THROW(Median({}), ParameterError);
}

// ---- optimizer ------------------------------------------------------------

TEST(AdamTest, FirstStepMovesBySignTimesRate) {
  ad::Parameter p(1, 2);
  p.value << 1.0, -2.0;
  p.grad << 0.5, -4.0;
  nn::ParamRegistry reg;
  reg.Add("p", &p);
  Adam adam(reg, {});
  adam.Step(0.01);
  // Bias-corrected first step: m_hat = g, v_hat = g^2 -> lr * g / (|g| + eps).
  EXPECT_NEAR(p.value(0, 0), RoundToFloat(1.0 - 0.01 * 0.5 / (0.5 + 1e-9)), 1e-7);
  EXPECT_NEAR(p.value(0, 1), RoundToFloat(-2.0 + 0.01 * 4.0 / (4.0 + 1e-9)), 1e-7);
  EXPECT_EQ(adam.steps(), 1);
}

TEST(AdamTest, ZeroRateLeavesParametersBitwise) {
  ad::Parameter p(2, 2);
  p.value << 0.1f, 0.2f, 0.3f, 0.4f;
  p.grad << 1, -1, 2, -2;
  const Mat before = p.value;
  nn::ParamRegistry reg;
  reg.Add("p", &p);
  Adam adam(reg, {});
  for (int i = 0; i < 5; ++i) adam.Step(0.0);
  EXPECT_TRUE(BitwiseEqual(p.value, before));
}

TEST(ClipTest, ScalesToMaxNorm) {
  ad::Parameter a(1, 2), b(1, 1);
  a.grad << 3, 0;
  b.grad << 4;
  nn::ParamRegistry reg;
  reg.Add("a", &a);
  reg.Add("b", &b);
  EXPECT_DOUBLE_EQ(ClipGradients(reg, 1.0), 5.0);
  EXPECT_NEAR(GradientNorm(reg), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(a.grad(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(ClipGradients(reg, 2.0), GradientNorm(reg));
}

// ---- config ---------------------------------------------------------------

TEST(RunConfigTest, PartialJsonKeepsDefaults) {
  const RunConfig c = ParseRunConfig(R"({"seed": 5, "train": {"batch_size": 4}, "model": {"timbre": {"groups": 8}}})");
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.train.batch_size, 4);
  EXPECT_EQ(c.train.max_steps, 3000);
  EXPECT_EQ(c.model.timbre.groups, 8);
  EXPECT_EQ(c.model.model_dim, 256);
}

TEST(RunConfigTest, UnknownKeysAreRejected) {
  EXPECT_THROW(ParseRunConfig(R"({"sede": 5})"), ConfigError);
  EXPECT_THROW(ParseRunConfig(R"({"train": {"batchsize": 4}})"), ConfigError);
  EXPECT_THROW(ParseRunConfig(R"({"model": {"extractor": {"chanels": [1,1,1,1,1]}}})"), ConfigError);
  EXPECT_THROW(ParseRunConfig("{not json"), ConfigError);
  EXPECT_THROW(ParseRunConfig(R"({"train": {"batch_size": 0}})"), ConfigError);
  EXPECT_THROW(ParseRunConfig(R"({"train": {"lambda_adv": -1}})"), ConfigError);
}

TEST(RunConfigTest, DumpRoundTripsAndHashTracksChanges) {
  const RunConfig a = RunConfig::Toy();
  const RunConfig b = ParseRunConfig(DumpRunConfig(a));
  EXPECT_EQ(DumpRunConfig(a), DumpRunConfig(b));
  EXPECT_EQ(ConfigHash(a), ConfigHash(b));
  EXPECT_EQ(ConfigHash(a).size(), 16u);
  RunConfig c = a;
  c.train.lambda_adv = 0.02;
  EXPECT_NE(ConfigHash(a), ConfigHash(c));
}

// ---- trainer --------------------------------------------------------------

TEST(TrainerTest, UnlabeledBatchMasksEmotionLoss) {
  const RunConfig cfg = MicroConfig();
  model::EmotionTransferModel m(cfg.model, cfg.seed);
  Trainer t(m, cfg, RandomExamples(4, false, 3));
  const auto opts = t.OptionsAt(1);
  Rng r1(9);
  const LossBreakdown b = t.ComputeGradients({0, 1, 2, 3}, opts, r1);
  EXPECT_EQ(b.l_emo_source, 0.0);
  const auto with_ce = Grads(m.section("emotion_encoder").params);

  RunConfig no_ce = cfg;
  no_ce.train.lambda_emo = 0.0;
  Trainer t2(m, no_ce, RandomExamples(4, false, 3));
  Rng r2(9);
  t2.ComputeGradients({0, 1, 2, 3}, opts, r2);
  const auto without_ce = Grads(m.section("emotion_encoder").params);
  ASSERT_EQ(with_ce.size(), without_ce.size());
  for (size_t i = 0; i < with_ce.size(); ++i) EXPECT_TRUE(BitwiseEqual(with_ce[i], without_ce[i]));
}

TEST(TrainerTest, LabeledBatchTrainsTheEmotionHead) {
  const RunConfig cfg = MicroConfig();
  model::EmotionTransferModel m(cfg.model, cfg.seed);
  Trainer t(m, cfg, RandomExamples(4, true, 3));
  Rng r1(9);
  const LossBreakdown b = t.ComputeGradients({0, 1, 2, 3}, t.OptionsAt(1), r1);
  EXPECT_GT(b.l_emo_source, 0.0);
  const Mat with_ce = m.emotion_encoder().logit_head().weight().grad;
  RunConfig no_ce = cfg;
  no_ce.train.lambda_emo = 0.0;
  Trainer t2(m, no_ce, RandomExamples(4, true, 3));
  Rng r2(9);
  t2.ComputeGradients({0, 1, 2, 3}, t2.OptionsAt(1), r2);
  EXPECT_GT((with_ce - m.emotion_encoder().logit_head().weight().grad).norm(), 1e-6);
}

TEST(TrainerTest, ZeroAdversarialWeightEqualsDetachedBranch) {
  RunConfig zero = MicroConfig();
  zero.train.lambda_adv = 0.0;
  RunConfig detached = MicroConfig();
  model::EmotionTransferModel m(zero.model, zero.seed);
  const auto examples = RandomExamples(4, true, 5);

  Trainer a(m, zero, examples);
  Rng ra(2);
  const LossBreakdown la = a.ComputeGradients({0, 1, 2, 3}, a.OptionsAt(1), ra);
  const auto ga = Grads(m.all_params());

  // Reversal scale 0 blocks the adversarial gradient below the classifier.
  Trainer b(m, detached, examples);
  auto opts = b.OptionsAt(1);
  opts.reversal_scale = 0.0;
  Rng rb(2);
  const LossBreakdown lb = b.ComputeGradients({0, 1, 2, 3}, opts, rb);
  const auto gb = Grads(m.all_params());

  EXPECT_EQ(la.l_adv_spk, lb.l_adv_spk);
  EXPECT_DOUBLE_EQ(la.total, lb.total - 0.01 * lb.l_adv_spk);
  const auto& entries = m.all_params().entries();
  for (size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].first.find("speaker_classifier") != std::string::npos) {
      EXPECT_EQ(ga[i].norm(), 0.0) << entries[i].first;
    } else {
      EXPECT_NEAR((ga[i] - gb[i]).norm(), 0.0, 1e-14 * (1.0 + ga[i].norm())) << entries[i].first;
    }
  }
}

TEST(TrainerTest, GradientReversalFlipsTheAdversarialTerm) {
  RunConfig base = MicroConfig();
  base.train.lambda_adv = 0.0;
  RunConfig adv = MicroConfig();
  adv.train.lambda_adv = 0.5;
  model::EmotionTransferModel m(base.model, base.seed);
  const auto examples = RandomExamples(4, true, 6);
  auto run = [&](const RunConfig& cfg, double reversal) {
    Trainer t(m, cfg, examples);
    auto opts = t.OptionsAt(1);
    opts.reversal_scale = reversal;
    Rng r(4);
    t.ComputeGradients({0, 1, 2, 3}, opts, r);
    return Grads(m.all_params());
  };
  const auto g0 = run(base, 1.0);
  const auto reversed = run(adv, 1.0);
  const auto plain = run(adv, -1.0);  // scale -1: identity backward
  const auto& entries = m.all_params().entries();
  int extractor_checked = 0;
  for (size_t i = 0; i < entries.size(); ++i) {
    const Mat dr = reversed[i] - g0[i];
    const Mat dp = plain[i] - g0[i];
    const double tol = 1e-12 * (1.0 + g0[i].norm());
    if (entries[i].first.find("speaker_classifier") != std::string::npos) {
      EXPECT_NEAR((dr - dp).norm(), 0.0, tol) << entries[i].first;
      EXPECT_GT(dr.norm(), 0.0);
    } else if (entries[i].first.find("extractor") != std::string::npos) {
      EXPECT_NEAR((dr + dp).norm(), 0.0, tol) << entries[i].first;
      if (dr.norm() > 1e-10) ++extractor_checked;
    }
  }
  EXPECT_GT(extractor_checked, 0);
}

TEST(TrainerTest, ZeroLearningRateLeavesParametersBitwise) {
  RunConfig cfg = MicroConfig();
  cfg.train.lr_scale = 0.0;
  model::EmotionTransferModel m(cfg.model, cfg.seed);
  const auto before = Values(m.all_params());
  Trainer t(m, cfg, RandomExamples(6, true, 7));
  for (int i = 0; i < 3; ++i) t.Step();
  const auto after = Values(m.all_params());
  for (size_t i = 0; i < before.size(); ++i) EXPECT_TRUE(BitwiseEqual(before[i], after[i]));
}

TEST(TrainerTest, IdenticalSeedsGiveIdenticalTraces) {
  for (auto mode : {model::TimbreMode::kLookup, model::TimbreMode::kZeroShot}) {
    const RunConfig cfg = MicroConfig(mode);
    const auto examples = RandomExamples(8, true, 8);
    std::ostringstream log_a, log_b;
    {
      model::EmotionTransferModel m(cfg.model, cfg.seed);
      Trainer t(m, cfg, examples);
      t.Run(100, &log_a);
    }
    {
      model::EmotionTransferModel m(cfg.model, cfg.seed);
      Trainer t(m, cfg, examples);
      t.Run(100, &log_b);
    }
    const std::string trace = log_a.str();
    EXPECT_EQ(trace, log_b.str());
    EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 100);
  }
}

TEST(TrainerTest, LogLineLayout) {
  StepStats s;
  s.step = 7;
  s.loss.l_mel = 0.5;
  s.loss.total = 1.25;
  s.tau = 0.5;
  s.lr = 1e-3;
  EXPECT_EQ(FormatLogLine(s), "7\t0.5\t0\t0\t0\t1.25\t0.5\t0.001");
}

TEST(TrainerTest, NonFiniteLossRaisesDivergence) {
  const RunConfig cfg = MicroConfig();
  model::EmotionTransferModel m(cfg.model, cfg.seed);
  auto examples = RandomExamples(2, true, 9);
  examples[0].mel(0, 0) = std::numeric_limits<double>::quiet_NaN();
  Trainer t(m, cfg, examples);
  EXPECT_THROW(t.StepOnBatch({0, 1}), DivergenceError);
}

TEST(TrainerTest, IntensityMedians) {
  const RunConfig cfg = MicroConfig();
  model::EmotionTransferModel m(cfg.model, cfg.seed);
  auto examples = RandomExamples(4, true, 10);  // labels 0..3, one each
  const auto med = ComputeIntensityMedians(m, examples, 1.2);
  ASSERT_EQ(med.size(), 8u);
  for (int e = 0; e < 4; ++e) {
    const Vec p = model::ModifiedSoftmax(m.EmotionLogits(examples[static_cast<size_t>(e)].mel), 1.2);
    EXPECT_EQ(med[static_cast<size_t>(e)], RoundToFloat(p(e)));
    EXPECT_GT(med[static_cast<size_t>(e)], 0.0);
    EXPECT_LT(med[static_cast<size_t>(e)], 1.0);
  }
  for (int e = 4; e < 8; ++e) EXPECT_TRUE(std::isnan(med[static_cast<size_t>(e)]));
}

// ---- checkpoint -----------------------------------------------------------

CheckpointMeta MetaFor(const Trainer& t, const model::EmotionTransferModel& m) {
  CheckpointMeta meta;
  meta.step = t.step();
  meta.speakers = {"a", "b", "c"};
  for (size_t i = 0; i < 3; ++i) {
    dsp::SpeakerStats s;
    s.mean = {5.0 + static_cast<double>(i), -20.0, 1.5};
    s.stddev = {0.25, 3.0, 0.5};
    meta.speaker_stats.Set(meta.speakers[i], s);
  }
  meta.intensity_medians = ComputeIntensityMedians(m, t.examples(), 1.2);
  return meta;
}

TEST(CheckpointTest, RoundTripIsBitwiseAndResumeMatches) {
  const fs::path dir = TempDir("ckpt");
  const RunConfig cfg = MicroConfig(model::TimbreMode::kZeroShot);
  const auto examples = RandomExamples(6, true, 12);

  model::EmotionTransferModel m(cfg.model, cfg.seed);
  Mat mean = Mat::Constant(1, 80, 0.5), sd = Mat::Constant(1, 80, 1.5);
  m.SetMelStats(mean, sd);
  Trainer t(m, cfg, examples);
  t.Run(6, nullptr);
  const std::string path = (dir / "a.ckpt").string();
  SaveCheckpoint(path, cfg, m, &t.optimizer(), MetaFor(t, m));

  LoadedModel loaded = LoadModel(path);
  EXPECT_TRUE(loaded.checkpoint.warnings.empty());
  EXPECT_EQ(loaded.checkpoint.meta.step, 6);
  EXPECT_EQ(loaded.checkpoint.meta.speaker_stats.Get("b").mean[0], 6.0);
  auto& m2 = *loaded.model;
  for (size_t i = 0; i < m.all_params().size(); ++i) {
    EXPECT_TRUE(BitwiseEqual(m.all_params().entries()[i].second->value, m2.all_params().entries()[i].second->value));
  }
  EXPECT_TRUE(BitwiseEqual(m.vq().codebook(), m2.vq().codebook()));

  // Forward outputs bitwise.
  const Mat timbre = m.TimbreFromMel(examples[0].mel);
  const Mat timbre2 = m2.TimbreFromMel(examples[0].mel);
  EXPECT_TRUE(BitwiseEqual(timbre, timbre2));
  const dsp::SpeakerStats& st = loaded.checkpoint.meta.speaker_stats.Get("a");
  EXPECT_TRUE(BitwiseEqual(m.Synthesize({1, 2, 3}, 1, 0.5, timbre, st).mel,
                           m2.Synthesize({1, 2, 3}, 1, 0.5, timbre2, st).mel));
  EXPECT_EQ(m.EmotionLogits(examples[1].mel), m2.EmotionLogits(examples[1].mel));

  // Resume: 6 more steps from the checkpoint equal 6 more uninterrupted.
  std::ostringstream uninterrupted, resumed;
  t.Run(12, &uninterrupted);
  Trainer t2(m2, loaded.checkpoint.config, examples);
  RestoreOptimizer(loaded.checkpoint, &t2.optimizer());
  t2.set_step(loaded.checkpoint.meta.step);
  t2.Run(12, &resumed);
  EXPECT_EQ(uninterrupted.str(), resumed.str());
}

TEST(CheckpointTest, HashMismatchWarnsAndMissingSectionFails) {
  const fs::path dir = TempDir("ckpt_bad");
  const RunConfig cfg = MicroConfig();
  model::EmotionTransferModel m(cfg.model, cfg.seed);
  Trainer t(m, cfg, RandomExamples(3, true, 13));
  const std::string path = (dir / "a.ckpt").string();
  SaveCheckpoint(path, cfg, m, nullptr, MetaFor(t, m));

  RunConfig other = cfg;
  other.train.lambda_emo = 0.4;
  EXPECT_TRUE(HashWarning(ReadCheckpoint(path), other).has_value());
  EXPECT_FALSE(HashWarning(ReadCheckpoint(path), cfg).has_value());

  TensorArchive ar = TensorArchive::Load(path, "EMOXFER-CHECKPOINT 1");
  ar.SetField("config_hash", "0000000000000000");
  ar.Save((dir / "tampered.ckpt").string());
  EXPECT_FALSE(ReadCheckpoint((dir / "tampered.ckpt").string()).warnings.empty());

  ar.RemoveSection("decoder");
  ar.Save((dir / "partial.ckpt").string());
  EXPECT_THROW(LoadModel((dir / "partial.ckpt").string()), CheckpointError);
  // No optimizer section was written.
  Adam adam(m.all_params(), {});
  EXPECT_THROW(RestoreOptimizer(ReadCheckpoint(path), &adam), CheckpointError);
  EXPECT_THROW(ReadCheckpoint((dir / "missing.ckpt").string()), CheckpointError);
}

}  // namespace
}  // namespace emoxfer::training
