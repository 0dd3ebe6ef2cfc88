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

#ifndef EMOXFER_TRAINING_TRAINER_H_
#define EMOXFER_TRAINING_TRAINER_H_

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "emoxfer/core/rng.h"
#include "emoxfer/model/transfer_model.h"
#include "emoxfer/training/objective.h"
#include "emoxfer/training/optimizer.h"
#include "emoxfer/training/run_config.h"

namespace emoxfer::training {

struct StepStats {
  int step = 0;
  LossBreakdown loss;
  double tau = 1.0;
  double lr = 0.0;
  double grad_norm = 0.0;
};

// step<TAB>l_mel<TAB>l_pros<TAB>l_adv<TAB>l_emo<TAB>total<TAB>tau<TAB>lr
std::string FormatLogLine(const StepStats& s);

// Owns the optimizer and the step counter. Step s (1-based) draws its batch
// and every noise sample from Rng(MixSeed(seed, s)), so the trace depends
// only on the config, the data and the starting checkpoint.
class Trainer {
 public:
  Trainer(model::EmotionTransferModel& model, const RunConfig& cfg, std::vector<model::TrainingExample> examples);

  // Zeroes and accumulates the gradient of the batch objective: per-utterance
  // means of l_mel, l_pros, l_adv and commitment, and l_emo averaged over
  // the labeled utterances only (0 when there are none).
  LossBreakdown ComputeGradients(const std::vector<int>& batch, const model::ForwardOptions& opts, Rng& rng);

  // Uniform sampling with replacement.
  std::vector<int> SampleBatch(Rng& rng) const;
  model::ForwardOptions OptionsAt(int step) const;

  // One update on a sampled batch. Throws DivergenceError on a non-finite
  // loss or gradient.
  StepStats Step();
  // One update on a fixed batch.
  StepStats StepOnBatch(const std::vector<int>& batch);

  // Steps until |last_step|, appending a log line per step to |log| and
  // calling |after_step| (if set) after each update.
  void Run(int last_step, std::ostream* log, const std::function<void(const StepStats&)>& after_step = {});

  int step() const { return step_; }
  void set_step(int step) { step_ = step; }
  Adam& optimizer() { return adam_; }
  const RunConfig& config() const { return cfg_; }
  const std::vector<model::TrainingExample>& examples() const { return examples_; }

 private:
  StepStats Update(int step, const std::vector<int>* fixed_batch);

  model::EmotionTransferModel& model_;
  RunConfig cfg_;
  std::vector<model::TrainingExample> examples_;
  Adam adam_;
  int step_ = 0;
};

// Median over labeled examples of the modified-softmax entry at the label,
// per labeled emotion (NaN when an emotion has no example). Rounded to
// float32.
std::vector<double> ComputeIntensityMedians(const model::EmotionTransferModel& model,
                                            const std::vector<model::TrainingExample>& examples, double alpha);

}  // namespace emoxfer::training

#endif  // EMOXFER_TRAINING_TRAINER_H_
