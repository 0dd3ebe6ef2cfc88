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

#ifndef EMOXFER_MODEL_PROSODY_PREDICTOR_H_
#define EMOXFER_MODEL_PROSODY_PREDICTOR_H_

#include <string>
#include <vector>

#include "emoxfer/core/nn.h"
#include "emoxfer/dsp/prosody.h"
#include "emoxfer/model/config.h"

namespace emoxfer::model {

// Six [conv1d -> ReLU -> LayerNorm] layers, dropout, and a joint linear
// head to the three normalized prosodic dimensions.
class ProsodyPredictor {
 public:
  ProsodyPredictor() = default;
  ProsodyPredictor(const ModelConfig& cfg, Rng& rng);

  // |hidden| is [n_phonemes x model_dim]; returns [n_phonemes x 3]. |rng|
  // drives dropout and is untouched when |training| is false.
  ad::Var Forward(ad::Tape& tape, ad::Var hidden, Rng& rng, bool training) const;
  void Collect(const std::string& prefix, nn::ParamRegistry* reg);

 private:
  double dropout_ = 0.2;
  std::vector<nn::Conv1d> convs_;
  std::vector<nn::LayerNorm> norms_;
  nn::Linear head_;
};

// Mean squared error over all phonemes and dimensions.
ad::Var ProsodyLoss(ad::Var pred, ad::Var target);

struct RealizedProsody {
  Mat physical;               // [n x 3]: log-F0, energy dB, log-duration
  std::vector<int> durations;  // frames, >= 1
};

// Denormalizes with the target speaker's statistics; durations are
// round(exp(log-duration)) clamped to at least one frame.
RealizedProsody RealizeProsody(const Mat& normalized, const dsp::SpeakerStats& stats);

}  // namespace emoxfer::model

#endif  // EMOXFER_MODEL_PROSODY_PREDICTOR_H_
