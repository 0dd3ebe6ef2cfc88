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

#include "emoxfer/training/trainer.h"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "emoxfer/core/error.h"
#include "emoxfer/model/emotion_encoder.h"

namespace emoxfer::training {

std::string FormatLogLine(const StepStats& s) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d\t%.9g\t%.9g\t%.9g\t%.9g\t%.9g\t%.9g\t%.9g", s.step, s.loss.l_mel,
                s.loss.l_pros, s.loss.l_adv_spk, s.loss.l_emo_source, s.loss.total, s.tau, s.lr);
  return buf;
}

Trainer::Trainer(model::EmotionTransferModel& model, const RunConfig& cfg,
                 std::vector<model::TrainingExample> examples)
    : model_(model),
      cfg_(cfg),
      examples_(std::move(examples)),
      adam_(model.all_params(), AdamConfig{cfg.train.adam_beta1, cfg.train.adam_beta2, cfg.train.adam_eps}) {
  cfg_.Validate();
  if (examples_.empty()) throw DataError("no training examples");
}

std::vector<int> Trainer::SampleBatch(Rng& rng) const {
  std::vector<int> batch(static_cast<size_t>(cfg_.train.batch_size));
  for (int& i : batch) i = rng.UniformInt(static_cast<int>(examples_.size()));
  return batch;
}

model::ForwardOptions Trainer::OptionsAt(int step) const {
  model::ForwardOptions o;
  o.alpha = cfg_.model.alpha;
  o.tau = GumbelTemperature(step, cfg_.train);
  o.training = true;
  return o;
}

LossBreakdown Trainer::ComputeGradients(const std::vector<int>& batch, const model::ForwardOptions& opts, Rng& rng) {
  if (batch.empty()) throw DataError("empty batch");
  model_.all_params().ZeroGrad();
  int labeled = 0;
  for (int i : batch) labeled += examples_.at(static_cast<size_t>(i)).label.has_value() ? 1 : 0;
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  const double inv_l = labeled > 0 ? 1.0 / labeled : 0.0;
  const LossWeights w = LossWeights::From(cfg_.train);

  LossBreakdown sum;
  for (int i : batch) {
    const model::TrainingExample& ex = examples_[static_cast<size_t>(i)];
    ad::Tape tape;
    model::ForwardResult r = model_.Forward(tape, ex, opts, rng);
    std::vector<ad::Var> terms{ad::Scale(r.l_mel, inv_b), ad::Scale(r.commitment, inv_b)};
    if (w.pros != 0.0) terms.push_back(ad::Scale(r.l_pros, w.pros * inv_b));
    if (w.adv != 0.0) terms.push_back(ad::Scale(r.l_adv, w.adv * inv_b));
    if (w.emo != 0.0 && ex.label) terms.push_back(ad::Scale(r.l_emo, w.emo * inv_l));
    ad::Var loss = terms[0];
    for (size_t k = 1; k < terms.size(); ++k) loss = ad::Add(loss, terms[k]);
    tape.Backward(loss);

    sum.l_mel += r.l_mel.scalar() * inv_b;
    sum.l_pros += r.l_pros.scalar() * inv_b;
    sum.l_adv_spk += r.l_adv.scalar() * inv_b;
    sum.commitment += r.commitment.scalar() * inv_b;
    if (ex.label) sum.l_emo_source += r.l_emo.scalar() * inv_l;
  }
  sum.total = WeightedTotal(sum, w);
  return sum;
}

StepStats Trainer::Update(int step, const std::vector<int>* fixed_batch) {
  const uint64_t step_seed = MixSeed(cfg_.seed, static_cast<uint64_t>(step));
  Rng rng(step_seed);
  const std::vector<int> batch = fixed_batch != nullptr ? *fixed_batch : SampleBatch(rng);
  StepStats s;
  s.step = step;
  const model::ForwardOptions opts = OptionsAt(step);
  s.tau = opts.tau;
  s.lr = LearningRate(step, cfg_.train.warmup_steps, cfg_.model.model_dim, cfg_.train.lr_scale);
  s.loss = ComputeGradients(batch, opts, rng);
  s.grad_norm = ClipGradients(model_.all_params(), cfg_.train.grad_clip);
  if (!std::isfinite(s.loss.total) || !std::isfinite(s.grad_norm)) {
    model_.vq().DiscardPending();
    throw DivergenceError("non-finite loss at step " + std::to_string(step) + ": " + FormatLogLine(s) +
                          "\tcommitment=" + std::to_string(s.loss.commitment) +
                          "\tgrad_norm=" + std::to_string(s.grad_norm));
  }
  adam_.Step(s.lr);
  if (cfg_.model.timbre.mode == model::TimbreMode::kZeroShot) {
    model_.vq().ApplyEmaUpdate(MixSeed(step_seed, 0x5eed));
  } else {
    model_.vq().DiscardPending();
  }
  step_ = step;
  return s;
}

StepStats Trainer::Step() { return Update(step_ + 1, nullptr); }

StepStats Trainer::StepOnBatch(const std::vector<int>& batch) { return Update(step_ + 1, &batch); }

void Trainer::Run(int last_step, std::ostream* log, const std::function<void(const StepStats&)>& after_step) {
  while (step_ < last_step) {
    const StepStats s = Step();
    if (log != nullptr) *log << FormatLogLine(s) << '\n' << std::flush;
    if (after_step) after_step(s);
  }
}

std::vector<double> ComputeIntensityMedians(const model::EmotionTransferModel& model,
                                            const std::vector<model::TrainingExample>& examples, double alpha) {
  const int n = model.config().num_labeled_emotions;
  std::vector<std::vector<double>> per(static_cast<size_t>(n));
  for (const auto& ex : examples) {
    if (!ex.label || *ex.label < 0 || *ex.label >= n) continue;
    const Vec p = model::ModifiedSoftmax(model.EmotionLogits(ex.mel), alpha);
    per[static_cast<size_t>(*ex.label)].push_back(p(*ex.label));
  }
  std::vector<double> out(static_cast<size_t>(n), std::numeric_limits<double>::quiet_NaN());
  for (int e = 0; e < n; ++e) {
    if (!per[static_cast<size_t>(e)].empty()) out[static_cast<size_t>(e)] = RoundToFloat(Median(per[static_cast<size_t>(e)]));
  }
  return out;
}

}  // namespace emoxfer::training
