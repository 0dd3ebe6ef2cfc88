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

// Acceptance suite: one [PASS]/[FAIL] line per criterion, exit status 1 if
// any criterion fails.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "emoxfer/eval/metrics.h"
#include "emoxfer/eval/transfer_eval.h"
#include "emoxfer/model/acoustic_model.h"
#include "emoxfer/model/emotion_encoder.h"
#include "emoxfer/model/prosody_predictor.h"
#include "emoxfer/model/timbre_encoder.h"
#include "emoxfer/toy/toy_corpus.h"
#include "emoxfer/training/checkpoint.h"
#include "emoxfer/training/corpus.h"
#include "emoxfer/training/objective.h"
#include "emoxfer/training/run_config.h"
#include "emoxfer/training/session.h"
#include "emoxfer/training/trainer.h"
#include "gradcheck.h"

namespace emoxfer {
namespace {

namespace fs = std::filesystem;
using model::ModelConfig;
using testing::ProjectToScalar;
using testing::RandomMat;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Accumulates sub-checks into one outcome.
class Checks {
 public:
  void Expect(bool ok, const std::string& what) {
    if (!ok) pass_ = false;
    if (!ok || verbose_) lines_.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  Outcome Done(const std::string& summary) const {
    Outcome o;
    o.pass = pass_;
    o.detail = summary;
    for (const auto& l : lines_) o.detail += "\n      " + l;
    return o;
  }
  bool verbose_ = true;

 private:
  bool pass_ = true;
  std::vector<std::string> lines_;
};

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

ModelConfig Micro() {
  ModelConfig c;
  c.vocab_size = 10;
  c.num_speakers = 3;
  c.model_dim = 8;
  c.ffn_filter = 8;
  c.encoder_blocks = 1;
  c.decoder_blocks = 1;
  c.predictor_layers = 2;
  c.predictor_dropout = 0.0;
  c.extractor.channels = {2, 2, 3, 3, 3};
  c.extractor.gru_hidden = 4;
  c.extractor.hidden_dim = 5;
  c.timbre.lstm_hidden = 4;
  c.timbre.groups = 2;
  c.timbre.codebook_size = 4;
  return c;
}

// ---- 1: analytic identities ----------------------------------------------

Outcome AnalyticIdentities() {
  Checks c;
  Rng rng(1);
  double worst_e = 0.0, worst_lim = 0.0;
  bool argmax_ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    const Vec z = RandomMat(10, 1, rng, 4.0).col(0);
    worst_e = std::max(worst_e, (model::ModifiedSoftmax(z, std::exp(1.0)) - model::SoftmaxPosterior(z)).cwiseAbs().maxCoeff());
    worst_lim = std::max(worst_lim, (model::ModifiedSoftmax(z, 1.0 + 1e-9).array() - 0.1).abs().maxCoeff());
    Eigen::Index ref = 0;
    z.maxCoeff(&ref);
    for (double alpha : {1.01, 1.2, 2.0, std::exp(1.0), 10.0}) {
      Eigen::Index arg = 0;
      model::ModifiedSoftmax(z, alpha).maxCoeff(&arg);
      argmax_ok = argmax_ok && arg == ref;
    }
  }
  c.Expect(worst_e <= 1e-9, Fmt("alpha=e vs softmax, max |diff| %.2e (< 1e-9)", worst_e));
  c.Expect(worst_lim <= 1e-6, Fmt("alpha=1+1e-9 vs 1/M, max |diff| %.2e (< 1e-6)", worst_lim));
  c.Expect(argmax_ok, "argmax unchanged for alpha in {1.01, 1.2, 2, e, 10} over 200 logit rows");
  training::LossBreakdown unit;
  unit.l_mel = unit.l_pros = unit.l_adv_spk = unit.l_emo_source = 1.0;
  const double total = training::WeightedTotal(unit, training::LossWeights{});
  c.Expect(total == 2.31, Fmt("composite loss on unit parts %.17g (== 2.31)", total));
  return c.Done("200 random logit rows, M = 10");
}

// ---- 2: gradient suite -----------------------------------------------------

Outcome GradientSuite() {
  Checks c;
  auto report = [&](const std::string& name, const testing::GradCheckResult& r) {
    c.Expect(r.max_rel_error < 1e-4 && r.checked > 0,
             name + Fmt(": max rel err %.2e over %.0f entries (%.0f re-checked at h/10)", r.max_rel_error, r.checked, r.rechecked) +
                 (r.worst.empty() ? "" : " (worst " + r.worst + ")"));
  };
  // Entries above tolerance are re-checked once at h / 10.
  auto CheckGradients = [](const nn::ParamRegistry& reg, const std::function<ad::Var(ad::Tape&)>& build,
                           int entries = 40) { return testing::CheckGradients(reg, build, entries, 1e-5, 1e-6, 1e-4); };
  const ModelConfig cfg = Micro();
  {
    Rng rng(7);
    model::EmotionExtractor ex(cfg.extractor, model::kMelBands, rng);
    nn::ParamRegistry reg;
    ex.Collect("extractor", &reg);
    const Mat mel = RandomMat(16, model::kMelBands, rng);
    report("extractor", CheckGradients(reg, [&](ad::Tape& t) { return ProjectToScalar(t, ex.Forward(t, t.Constant(mel))); }, 12));
  }
  {
    Rng rng(8);
    model::EmotionEncoder enc(cfg, model::kMelBands, rng);
    ad::Parameter h(1, cfg.extractor.hidden_dim);
    h.value = RandomMat(1, cfg.extractor.hidden_dim, rng);
    nn::ParamRegistry reg;
    enc.logit_head().Collect("logit_head", &reg);
    reg.Add("hidden", &h);
    report("logit head", CheckGradients(reg, [&](ad::Tape& t) { return ProjectToScalar(t, enc.Logits(t, t.Param(h))); }));
  }
  {
    Rng rng(3);
    model::ProsodyPredictor pred(cfg, rng);
    ad::Parameter h(4, cfg.model_dim);
    h.value = RandomMat(4, cfg.model_dim, rng);
    nn::ParamRegistry reg;
    pred.Collect("predictor", &reg);
    reg.Add("hidden", &h);
    report("prosody predictor", CheckGradients(reg, [&](ad::Tape& t) {
             Rng unused(0);
             return ProjectToScalar(t, pred.Forward(t, t.Param(h), unused, false));
           }));
  }
  {
    Rng rng(2);
    model::PhonemeEncoder enc(cfg, rng);
    nn::ParamRegistry reg;
    enc.Collect("encoder", &reg);
    report("FFT blocks (phoneme encoder)",
           CheckGradients(reg, [&](ad::Tape& t) { return ProjectToScalar(t, enc.Forward(t, {1, 4, 4, 7, 2})); }));
  }
  {
    Rng rng(8);
    model::MelDecoder dec(cfg, model::kMelBands, rng);
    const Mat f = RandomMat(9, cfg.model_dim, rng);
    nn::ParamRegistry reg;
    dec.Collect("decoder", &reg);
    report("decoder", CheckGradients(reg, [&](ad::Tape& t) { return ProjectToScalar(t, dec.Forward(t, t.Constant(f))); }));
  }
  {
    Rng rng(5);
    model::ProsodyInjection inj(cfg.model_dim, rng);
    const Mat h = RandomMat(4, cfg.model_dim, rng);
    ad::Parameter p(4, 3);
    p.value = RandomMat(4, 3, rng);
    nn::ParamRegistry reg;
    inj.Collect("injection", &reg);
    reg.Add("prosody", &p);
    report("prosody-injection conv", CheckGradients(reg, [&](ad::Tape& t) {
             return ProjectToScalar(t, inj.Forward(t, t.Constant(h), t.Param(p)));
           }));
  }
  {
    Rng rng(3);
    model::SpeakerEmbedder emb(model::kMelBands, cfg.timbre.lstm_hidden, cfg.model_dim, rng);
    nn::ParamRegistry reg;
    emb.Collect("embedder", &reg);
    const Mat mel = RandomMat(7, model::kMelBands, rng);
    report("speaker embedder", CheckGradients(reg, [&](ad::Tape& t) { return ProjectToScalar(t, emb.Forward(t, t.Constant(mel))); }));
  }
  {
    // Straight-through one-hot: the upstream gradient passes unchanged.
    Rng rng(9);
    ad::Parameter y(1, 10);
    y.value = RandomMat(1, 10, rng);
    const Mat g = RandomMat(1, 10, rng);
    ad::Tape t;
    ad::Var hard = model::StraightThroughOneHot(t.Param(y));
    t.Backward(ad::Sum(ad::Mul(hard, t.Constant(g))));
    c.Expect(y.grad == g && hard.value() == model::OneHotArgmax(y.value),
             "straight-through Gumbel one-hot: Jacobian exactly identity");
  }
  {
    Rng rng(7);
    model::TimbreConfig tc;
    tc.groups = 4;
    tc.codebook_size = 8;
    model::GroupedVq vq(16, tc, rng);
    ad::Parameter v(1, 16);
    v.value = RandomMat(1, 16, rng);
    const Mat g = RandomMat(1, 16, rng);
    ad::Tape t;
    model::VqOutput out = vq.Quantize(t, t.Param(v), false);
    t.Backward(ad::Sum(ad::Mul(out.quantized, t.Constant(g))));
    c.Expect(v.grad == g && out.quantized.value() == vq.Lookup(out.indices),
             "VQ straight-through: Jacobian exactly identity");
  }
  return c.Done("micro widths, fourth-order central differences, h = 1e-5");
}

// ---- 3: Gumbel sampling oracle ---------------------------------------------

Outcome GumbelOracle() {
  Checks c;
  Mat z(1, 6);
  z << 1.2, -0.4, 0.3, 2.0, -1.5, 0.0;
  const Vec target = model::SoftmaxPosterior(z.row(0).transpose());
  Rng rng(2024);
  const int n = 100000;
  std::vector<double> freq(6, 0.0);
  for (int s = 0; s < n; ++s) {
    ad::Tape tape(false);
    ad::Var hard = model::StraightThroughOneHot(model::GumbelSoftmax(tape.Constant(z), model::SampleGumbel(6, rng), 0.5));
    Eigen::Index arg = 0;
    hard.value().row(0).maxCoeff(&arg);
    freq[static_cast<size_t>(arg)] += 1.0 / n;
  }
  double tv = 0.0;
  for (int i = 0; i < 6; ++i) tv += 0.5 * std::abs(freq[static_cast<size_t>(i)] - target(i));
  c.Expect(tv < 0.01, Fmt("total variation %.5f (< 0.01)", tv));
  return c.Done("1e5 hard samples, tau = 0.5, 6 classes");
}

// ---- 4: VQ oracle ----------------------------------------------------------

Outcome VqOracle() {
  Checks c;
  Rng rng(5);
  const int dim = 256, k = 32;
  for (int groups : {2, 4, 8}) {
    model::TimbreConfig tc;
    tc.groups = groups;
    tc.codebook_size = k;
    model::GroupedVq vq(dim, tc, rng);
    const int w = vq.group_width();
    int mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      Mat v(1, dim);
      for (int i = 0; i < dim; ++i) v(0, i) = rng.Normal();
      v /= v.norm();
      const auto idx = vq.Assign(v);
      for (int g = 0; g < groups; ++g) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int j = 0; j < k; ++j) {
          double d = 0.0;
          for (int x = 0; x < w; ++x) {
            const double diff = v(0, g * w + x) - vq.codebook()(j, x);
            d += diff * diff;
          }
          if (d < best_d) {
            best_d = d;
            best = j;
          }
        }
        if (idx[static_cast<size_t>(g)] != best) ++mismatches;
      }
    }
    c.Expect(mismatches == 0, Fmt("G=%.0f: %.0f index mismatches against brute force over 1000 embeddings", groups, mismatches));
    const double bits = vq.CapacityBits();
    c.Expect(bits == 5.0 * groups, Fmt("G=%.0f: capacity %.17g bits (== %.0f)", groups, bits, 5.0 * groups));
  }
  return c.Done("K = 32, width 256");
}

// ---- 5: semi-supervised masking --------------------------------------------

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

training::RunConfig MicroRun() {
  training::RunConfig c;
  c.seed = 11;
  auto& m = c.model;
  m = Micro();
  m.vocab_size = 8;
  m.attention_heads = 2;
  m.ffn_filter = 16;
  c.train.batch_size = 4;
  c.train.warmup_steps = 10;
  return c;
}

std::vector<Mat> Grads(const nn::ParamRegistry& reg) {
  std::vector<Mat> g;
  for (const auto& [name, p] : reg.entries()) g.push_back(p->grad);
  return g;
}

Outcome Masking() {
  Checks c;
  const training::RunConfig cfg = MicroRun();
  model::EmotionTransferModel m(cfg.model, cfg.seed);
  const auto examples = RandomExamples(4, false, 3);
  {
    // The emotion term alone, backpropagated, leaves the head untouched.
    Rng rng(1);
    nn::ParamRegistry head;
    m.emotion_encoder().logit_head().Collect("head", &head);
    nn::ParamRegistry all;
    m.emotion_encoder().Collect("enc", &all);
    all.ZeroGrad();
    double l_emo = 0.0, grad = 0.0;
    for (const auto& ex : examples) {
      ad::Tape t;
      model::EmotionOutcome out = m.emotion_encoder().Forward(t, t.Constant(ex.mel), ex.speaker, std::nullopt, {}, rng);
      l_emo += out.emo_loss.scalar();
      t.Backward(out.emo_loss);
    }
    for (const auto& g : Grads(all)) grad = std::max(grad, g.cwiseAbs().maxCoeff());
    c.Expect(l_emo == 0.0 && grad == 0.0, Fmt("unlabeled batch: l_emo_source %.1f, max |d l_emo / d encoder| %.1f", l_emo, grad));
  }
  {
    // Full objective: the emotion weight has no effect on any gradient.
    training::Trainer t(m, cfg, examples);
    Rng r1(9);
    const auto b = t.ComputeGradients({0, 1, 2, 3}, t.OptionsAt(1), r1);
    const auto with_ce = Grads(m.section("emotion_encoder").params);
    training::RunConfig no_ce = cfg;
    no_ce.train.lambda_emo = 0.0;
    training::Trainer t2(m, no_ce, examples);
    Rng r2(9);
    t2.ComputeGradients({0, 1, 2, 3}, t2.OptionsAt(1), r2);
    const auto without_ce = Grads(m.section("emotion_encoder").params);
    bool same = with_ce.size() == without_ce.size();
    for (size_t i = 0; same && i < with_ce.size(); ++i) same = with_ce[i] == without_ce[i];
    c.Expect(b.l_emo_source == 0.0 && same,
             "trainer on unlabeled batch: l_emo_source = 0, encoder gradient identical with lambda_emo = 0.5 and 0");
  }
  {
    // Reversal sign: the adversarial contribution below the classifier is
    // negated, the classifier's own gradient is not.
    training::RunConfig base = cfg;
    base.train.lambda_adv = 0.0;
    training::RunConfig adv = cfg;
    adv.train.lambda_adv = 0.5;
    const auto labeled = RandomExamples(4, true, 6);
    auto run = [&](const training::RunConfig& rc, double reversal) {
      training::Trainer t(m, rc, labeled);
      auto opts = t.OptionsAt(1);
      opts.reversal_scale = reversal;
      Rng r(4);
      t.ComputeGradients({0, 1, 2, 3}, opts, r);
      return Grads(m.all_params());
    };
    const auto g0 = run(base, 1.0);
    const auto reversed = run(adv, 1.0);
    const auto plain = run(adv, -1.0);
    const auto& entries = m.all_params().entries();
    double worst_extractor = 0.0, worst_classifier = 0.0;
    int flipped = 0;
    for (size_t i = 0; i < entries.size(); ++i) {
      const Mat dr = reversed[i] - g0[i];
      const Mat dp = plain[i] - g0[i];
      const double scale = 1.0 + g0[i].norm();
      if (entries[i].first.find("speaker_classifier") != std::string::npos) {
        worst_classifier = std::max(worst_classifier, (dr - dp).norm() / scale);
      } else if (entries[i].first.find("extractor") != std::string::npos) {
        worst_extractor = std::max(worst_extractor, (dr + dp).norm() / scale);
        if (dr.norm() > 1e-10) ++flipped;
      }
    }
    c.Expect(worst_extractor < 1e-12 && flipped > 0,
             Fmt("reversal: extractor adversarial gradient negated (residual %.1e, %.0f tensors)", worst_extractor, flipped));
    c.Expect(worst_classifier < 1e-12, Fmt("reversal: classifier gradient unchanged (residual %.1e)", worst_classifier));
  }
  return c.Done("micro model, 4-utterance batches");
}

// ---- shared toy experiment state ---------------------------------------------

class ToyExperiment {
 public:
  explicit ToyExperiment(fs::path workdir) : workdir_(std::move(workdir)) {}

  const toy::ToyCorpus& Plan() {
    Ensure();
    return plan_;
  }
  const training::PreparedCorpus& All() {
    Ensure();
    return *all_;
  }
  const training::PreparedCorpus& Sources() {
    Ensure();
    if (!sources_) sources_ = training::PrepareManifest(files_.source_manifest, plan_.spec.vocab_size);
    return *sources_;
  }
  training::RunConfig Config() {
    training::RunConfig cfg = training::RunConfig::Toy();
    cfg.model.vocab_size = Plan().spec.vocab_size;
    return cfg;
  }
  // Lookup-mode run of the full toy corpus into |name|; cached.
  const training::SessionResult& LookupRun(const std::string& name) {
    auto it = runs_.find(name);
    if (it != runs_.end()) return it->second;
    training::SessionOptions so;
    so.out_dir = (workdir_ / name).string();
    so.progress = &std::cout;
    so.progress_every = 1000;
    return runs_[name] = training::RunTraining(Config(), All(), so);
  }
  const fs::path& workdir() const { return workdir_; }

 private:
  void Ensure() {
    if (all_) return;
    plan_ = toy::PlanCorpus(toy::ToyCorpusSpec{});
    files_ = toy::WriteToyCorpus(plan_, (workdir_ / "corpus").string());
    all_ = training::PrepareManifest(files_.all_manifest, plan_.spec.vocab_size);
  }

  fs::path workdir_;
  toy::ToyCorpus plan_;
  toy::ToyCorpusFiles files_;
  std::optional<training::PreparedCorpus> all_;
  std::optional<training::PreparedCorpus> sources_;
  std::map<std::string, training::SessionResult> runs_;
};

std::vector<eval::TargetVoice> TargetVoices(ToyExperiment& x, model::EmotionTransferModel& m,
                                            const training::CheckpointMeta& meta, bool zero_shot) {
  std::vector<eval::TargetVoice> voices;
  for (const auto& v : x.Plan().speakers) {
    if (v.source) continue;
    voices.push_back(zero_shot ? eval::ZeroShotVoice(m, v.name, eval::ReferenceUtterances(x.All(), v.name, 5))
                               : eval::SeenVoice(m, meta, v.name));
  }
  return voices;
}

// ---- 6: overfit smoke ------------------------------------------------------

Outcome Overfit(ToyExperiment& x) {
  Checks c;
  training::RunConfig cfg = x.Config();
  cfg.model.num_speakers = static_cast<int>(x.All().speakers.size());
  const auto all = training::BuildExamples(x.All());
  std::vector<model::TrainingExample> eight;
  for (int i = 0; i < 8; ++i) eight.push_back(all[static_cast<size_t>(i) * all.size() / 8]);
  model::EmotionTransferModel m(cfg.model, cfg.seed);
  training::Trainer t(m, cfg, eight);
  const std::vector<int> batch{0, 1, 2, 3, 4, 5, 6, 7};
  double at10 = 0.0, at500 = 0.0;
  for (int s = 1; s <= 500; ++s) {
    const auto stats = t.StepOnBatch(batch);
    if (s == 10) at10 = stats.loss.l_mel;
    if (s == 500) at500 = stats.loss.l_mel;
  }
  const double ratio = at10 / at500;
  c.Expect(ratio >= 10.0, Fmt("l_mel step 10 %.4f, step 500 %.4f, ratio %.2f (>= 10)", at10, at500, ratio));
  return c.Done("8 fixed toy utterances, toy profile");
}

// ---- 7: desk-scale transfer ---------------------------------------------------

Outcome Transfer(ToyExperiment& x) {
  Checks c;
  const auto& run = x.LookupRun("lookup_a");
  auto loaded = training::LoadModel(run.checkpoint_path);
  const auto& meta = loaded.checkpoint.meta;
  const auto voices = TargetVoices(x, *loaded.model, meta, false);
  const auto rep = eval::EvaluateTransfer(*loaded.model, meta, x.Plan(), voices, eval::SpeakerEnvelopes(x.All()), {});
  for (const auto& p : rep.pairs) {
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%s x %s: median F0 corr %.3f (> 0.8); envelope dist target %.3f vs nearest source %.3f",
                  p.target.c_str(), x.Plan().spec.templates[static_cast<size_t>(p.emotion)].name.c_str(),
                  p.median_correlation, p.pooled_target_distance, p.pooled_source_distance);
    c.Expect(p.emotion_ok && p.speaker_ok, buf);
  }
  c.Expect(!rep.pairs.empty(), Fmt("%.0f unseen (target, emotion) pairs", rep.pairs.size()));
  return c.Done(Fmt("3000 steps, lookup timbre; mean corr %.3f", rep.mean_correlation));
}

// ---- 8: intensity control ---------------------------------------------------

Outcome Intensity(ToyExperiment& x) {
  Checks c;
  const auto& run = x.LookupRun("lookup_a");
  auto loaded = training::LoadModel(run.checkpoint_path);
  const auto& meta = loaded.checkpoint.meta;
  const auto voices = TargetVoices(x, *loaded.model, meta, false);
  for (const auto& r : eval::EvaluateIntensityOrder(*loaded.model, meta, x.Plan(), voices, {})) {
    c.Expect(r.Fraction() >= 0.8,
             x.Plan().spec.templates[static_cast<size_t>(r.emotion)].name +
                 Fmt(": monotone %.0f / %.0f sentences = %.2f (>= 0.8); median intensity %.4f", r.monotone, r.sentences,
                     r.Fraction(), meta.intensity_medians[static_cast<size_t>(r.emotion)]));
  }
  return c.Done("levels 0.1 / median / 1.0 on #7's checkpoint");
}

// ---- 9: IB trade-off -----------------------------------------------------------

double Median3(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

Outcome IbTradeoff(ToyExperiment& x) {
  Checks c;
  const auto envelopes = eval::SpeakerEnvelopes(x.All());
  std::vector<double> corr, dist;
  const std::vector<int> groups{2, 4, 8};
  for (int g : groups) {
    std::vector<double> cs, ds;
    for (uint64_t seed : {1, 2, 3}) {
      training::RunConfig cfg = x.Config();
      cfg.seed = seed;
      cfg.model.timbre.mode = model::TimbreMode::kZeroShot;
      cfg.model.timbre.groups = g;
      training::SessionOptions so;
      so.out_dir = (x.workdir() / ("zs_g" + std::to_string(g) + "_s" + std::to_string(seed))).string();
      const auto res = training::RunTraining(cfg, x.Sources(), so);
      auto loaded = training::LoadModel(res.checkpoint_path);
      const auto voices = TargetVoices(x, *loaded.model, loaded.checkpoint.meta, true);
      const auto rep = eval::EvaluateTransfer(*loaded.model, loaded.checkpoint.meta, x.Plan(), voices, envelopes, {});
      cs.push_back(rep.mean_correlation);
      ds.push_back(rep.mean_target_distance);
      std::printf("    G=%d seed=%d: mean corr %.4f, mean target distance %.4f\n", g, static_cast<int>(seed),
                  rep.mean_correlation, rep.mean_target_distance);
      std::fflush(stdout);
    }
    corr.push_back(Median3(cs));
    dist.push_back(Median3(ds));
    c.Expect(true, Fmt("G=%.0f: median corr %.4f, median target envelope distance %.4f", g, corr.back(), dist.back()));
  }
  c.Expect(corr[0] >= corr[1] && corr[1] >= corr[2],
           Fmt("emotion correlation non-increasing in G: %.4f >= %.4f >= %.4f", corr[0], corr[1], corr[2]));
  c.Expect(dist[0] >= dist[1] && dist[1] >= dist[2],
           Fmt("target envelope distance non-increasing in G (fidelity non-decreasing): %.4f >= %.4f >= %.4f", dist[0],
               dist[1], dist[2]));
  return c.Done("zero-shot, G in {2, 4, 8} x seeds {1, 2, 3}, 5 references");
}

// ---- 10: reproducibility ----------------------------------------------------

std::string Slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome Reproducibility(ToyExperiment& x) {
  Checks c;
  const std::string a = Slurp(x.LookupRun("lookup_a").log_path);
  const std::string b = Slurp(x.LookupRun("lookup_b").log_path);
  const double lines = static_cast<double>(std::count(a.begin(), a.end(), '\n'));
  c.Expect(!a.empty() && a == b, Fmt("train.log byte-identical across two runs (%.0f lines)", lines));
  return c.Done("two lookup runs, same seed");
}

}  // namespace
}  // namespace emoxfer

int main(int argc, char** argv) {
  using namespace emoxfer;
  CLI::App app{"emoxfer acceptance suite"};
  std::vector<int> only;
  std::string workdir = (fs::temp_directory_path() / "emoxfer_acceptance").string();
  app.add_option("--only", only, "criterion numbers to run (default: all)")->check(CLI::Range(1, 10));
  app.add_option("--workdir", workdir, "scratch directory for corpora and runs");
  CLI11_PARSE(app, argc, argv);

  fs::remove_all(workdir);
  fs::create_directories(workdir);
  ToyExperiment toy_state{fs::path(workdir)};

  struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "analytic identities", AnalyticIdentities},
      {2, "gradient suite", GradientSuite},
      {3, "Gumbel sampling oracle", GumbelOracle},
      {4, "VQ oracle", VqOracle},
      {5, "semi-supervised masking", Masking},
      {6, "overfit smoke", [&] { return Overfit(toy_state); }},
      {7, "desk-scale transfer", [&] { return Transfer(toy_state); }},
      {8, "intensity control", [&] { return Intensity(toy_state); }},
      {9, "IB trade-off", [&] { return IbTradeoff(toy_state); }},
      {10, "reproducibility", [&] { return Reproducibility(toy_state); }},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  std::vector<std::string> summary;
  for (const auto& cr : criteria) {
    if (!selected.empty() && !selected.count(cr.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char head[160];
    std::snprintf(head, sizeof(head), "[%s] %d %s (%.1fs): ", o.pass ? "PASS" : "FAIL", cr.id, cr.name.c_str(), secs);
    std::printf("%s%s\n", head, o.detail.c_str());
    std::fflush(stdout);
    summary.push_back(std::string(o.pass ? "[PASS] " : "[FAIL] ") + std::to_string(cr.id) + " " + cr.name);
    if (!o.pass) ++failures;
  }
  std::printf("\nsummary\n");
  for (const auto& s : summary) std::printf("  %s\n", s.c_str());
  return failures == 0 ? 0 : 1;
}
