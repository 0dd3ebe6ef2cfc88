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

#ifndef EMOXFER_TRAINING_OBJECTIVE_H_
#define EMOXFER_TRAINING_OBJECTIVE_H_

#include <vector>

#include "emoxfer/core/tensor.h"
#include "emoxfer/training/run_config.h"

namespace emoxfer::training {

struct LossWeights {
  double pros = 0.8;
  double adv = 0.01;
  double emo = 0.5;

  static LossWeights From(const TrainConfig& cfg) { return {cfg.lambda_pros, cfg.lambda_adv, cfg.lambda_emo}; }
};

struct LossBreakdown {
  double l_mel = 0.0;
  double l_pros = 0.0;
  double l_adv_spk = 0.0;
  double l_emo_source = 0.0;
  double commitment = 0.0;  // zero-shot mode only
  double total = 0.0;
};

// total = l_mel + pros*l_pros + adv*l_adv + emo*l_emo + commitment.
double WeightedTotal(const LossBreakdown& parts, const LossWeights& w);

// Loss of one utterance from its predictions: mel MAE over frames x bands,
// prosody MSE over phonemes x 3. |emo_loss| must already be masked (0 for
// unlabeled utterances). Throws ShapeError on mismatched shapes.
LossBreakdown CompositeLoss(const Mat& pred_mel, const Mat& true_mel, const Mat& pred_prosody,
                            const Mat& true_prosody, double adv_loss, double emo_loss, const LossWeights& w);

// width^-0.5 * min(step^-0.5, step * warmup^-1.5), times |scale|. Step 0
// is treated as step 1.
double LearningRate(int step, int warmup, int width, double scale = 1.0);

// tau_start * (tau_end / tau_start)^(min(step, S) / S), S = fraction *
// max_steps.
double GumbelTemperature(int step, const TrainConfig& cfg);

// Median of |values| (mean of the middle pair for even counts). Throws
// ParameterError on empty input.
double Median(std::vector<double> values);

}  // namespace emoxfer::training

#endif  // EMOXFER_TRAINING_OBJECTIVE_H_
