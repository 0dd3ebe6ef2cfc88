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

#ifndef EMOXFER_MODEL_EMOTION_ENCODER_H_
#define EMOXFER_MODEL_EMOTION_ENCODER_H_

#include <array>
#include <optional>
#include <string>

#include "emoxfer/core/nn.h"
#include "emoxfer/model/config.h"

namespace emoxfer::model {

using ad::Tape;
using ad::Var;

// ---- posterior and intensity --------------------------------------------

// Max-subtracted softmax of a logit row.
Vec SoftmaxPosterior(const Vec& z);
// alpha^z_i / sum_j alpha^z_j, evaluated as exp(z ln alpha) with max
// subtraction. Throws ParameterError unless alpha > 1.
Vec ModifiedSoftmax(const Vec& z, double alpha);
// Differentiable counterpart on a [1 x M] row.
Var ModifiedSoftmax(Var z, double alpha);

// Gumbel(0, 1) noise row of width |m|.
Mat SampleGumbel(int m, Rng& rng);
// softmax((z + g) / tau) for a [1 x M] row; |gumbel| must match |z|.
Var GumbelSoftmax(Var z, const Mat& gumbel, double tau);
// One-hot at the argmax of |y| (first index on ties).
Mat OneHotArgmax(const Mat& y);
// Forward: one-hot at argmax(y); backward: identity to y.
Var StraightThroughOneHot(Var y);

// ---- networks -------------------------------------------------------------

// Five Conv-Norm stages over the mel image, a bidirectional GRU over the
// downsampled time axis, and a projection of the concatenated final states
// to the hidden feature.
class EmotionExtractor {
 public:
  EmotionExtractor() = default;
  EmotionExtractor(const ExtractorConfig& cfg, int mel_bands, Rng& rng);

  // |mel| is [T x mel_bands]; returns [1 x hidden_dim]. Throws
  // ShortInputError below MinFrames().
  Var Forward(Tape& tape, Var mel) const;
  void Collect(const std::string& prefix, nn::ParamRegistry* reg);

  int hidden_dim() const { return hidden_dim_; }
  static constexpr int MinFrames() { return 1; }

 private:
  int mel_bands_ = 80;
  int hidden_dim_ = 0;
  std::array<nn::ConvNormStage, 5> stages_;
  nn::Gru forward_gru_;
  nn::Gru backward_gru_;
  nn::Linear projection_;
};

struct EmotionOutcome {
  Var hidden;     // [1 x d_h]
  Var logits;     // [1 x M]
  Var soft;       // Gumbel-softmax sample y
  Var one_hot;    // y', straight-through
  Var intensity;  // modified-softmax entry at type_id (1x1)
  int type_id = 0;
  Var emo_loss;   // 1x1, constant 0 when unlabeled
  Var adv_loss;   // 1x1
  bool labeled = false;
};

struct EmotionStepOptions {
  double alpha = 1.2;
  double tau = 1.0;
  bool training = true;
  double reversal_scale = 1.0;
};

// Extractor, logit head, and the adversarial speaker classifier behind a
// gradient reversal layer.
class EmotionEncoder {
 public:
  EmotionEncoder() = default;
  EmotionEncoder(const ModelConfig& cfg, int mel_bands, Rng& rng);

  Var Hidden(Tape& tape, Var mel) const { return extractor_.Forward(tape, mel); }
  Var Logits(Tape& tape, Var hidden) const { return logit_head_.Forward(tape, hidden); }
  // Cross-entropy of the speaker classifier; the gradient reaching |hidden|
  // is multiplied by -reversal_scale.
  Var AdversarialLoss(Tape& tape, Var hidden, int speaker, double reversal_scale = 1.0) const;

  // Full semi-supervised forward. |rng| supplies the Gumbel noise. A label
  // must be < N (LabelError otherwise); without one emo_loss is exactly 0.
  EmotionOutcome Forward(Tape& tape, Var mel, int speaker, std::optional<int> label,
                         const EmotionStepOptions& opts, Rng& rng) const;

  void Collect(const std::string& prefix, nn::ParamRegistry* reg);

  nn::Linear& logit_head() { return logit_head_; }
  nn::Linear& speaker_classifier() { return speaker_classifier_; }
  const EmotionExtractor& extractor() const { return extractor_; }
  int num_slots() const { return num_slots_; }
  int num_labeled() const { return num_labeled_; }

 private:
  int num_slots_ = 10;
  int num_labeled_ = 8;
  EmotionExtractor extractor_;
  nn::Linear logit_head_;
  nn::Linear speaker_classifier_;
};

}  // namespace emoxfer::model

#endif  // EMOXFER_MODEL_EMOTION_ENCODER_H_
