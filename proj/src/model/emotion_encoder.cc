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

#include "emoxfer/model/emotion_encoder.h"

#include <cmath>

#include "emoxfer/core/error.h"
#include "emoxfer/core/rng.h"

namespace emoxfer::model {

Vec SoftmaxPosterior(const Vec& z) {
  const Eigen::ArrayXd e = (z.array() - z.maxCoeff()).exp();
  return (e / e.sum()).matrix();
}

Vec ModifiedSoftmax(const Vec& z, double alpha) {
  if (!(alpha > 1.0)) throw ParameterError("modified softmax requires alpha > 1");
  return SoftmaxPosterior(z * std::log(alpha));
}

Var ModifiedSoftmax(Var z, double alpha) {
  if (!(alpha > 1.0)) throw ParameterError("modified softmax requires alpha > 1");
  return ad::SoftmaxRows(ad::Scale(z, std::log(alpha)));
}

Mat SampleGumbel(int m, Rng& rng) {
  Mat g(1, m);
  for (int i = 0; i < m; ++i) g(0, i) = rng.Gumbel();
  return g;
}

Var GumbelSoftmax(Var z, const Mat& gumbel, double tau) {
  if (!(tau > 0.0)) throw ParameterError("Gumbel-softmax temperature must be positive");
  Tape& tape = *z.tape();
  return ad::SoftmaxRows(ad::Scale(ad::Add(z, tape.Constant(gumbel)), 1.0 / tau));
}

Mat OneHotArgmax(const Mat& y) {
  Mat out = Mat::Zero(y.rows(), y.cols());
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    Eigen::Index arg = 0;
    y.row(r).maxCoeff(&arg);
    out(r, arg) = 1.0;
  }
  return out;
}

Var StraightThroughOneHot(Var y) { return ad::StraightThrough(y, OneHotArgmax(y.value())); }

// ---- EmotionExtractor ---------------------------------------------------------

EmotionExtractor::EmotionExtractor(const ExtractorConfig& cfg, int mel_bands, Rng& rng)
    : mel_bands_(mel_bands), hidden_dim_(cfg.hidden_dim) {
  int in_ch = 1;
  int width = mel_bands;
  for (int s = 0; s < 5; ++s) {
    const int stride_h = s < cfg.time_strided_stages ? 2 : 1;
    stages_[s] = nn::ConvNormStage(in_ch, cfg.channels[s], stride_h, 2, rng);
    in_ch = cfg.channels[s];
    width = (width - 1) / 2 + 1;
  }
  const int gru_in = width * in_ch;
  forward_gru_ = nn::Gru(gru_in, cfg.gru_hidden, rng);
  backward_gru_ = nn::Gru(gru_in, cfg.gru_hidden, rng);
  projection_ = nn::Linear(2 * cfg.gru_hidden, cfg.hidden_dim, rng);
}

Var EmotionExtractor::Forward(Tape& tape, Var mel) const {
  if (mel.cols() != mel_bands_) throw ShapeError("extractor expects " + std::to_string(mel_bands_) + " mel bands");
  if (mel.rows() < MinFrames()) {
    throw ShortInputError("emotion extractor needs at least " + std::to_string(MinFrames()) + " frame(s)");
  }
  int height = static_cast<int>(mel.rows());
  int width = mel_bands_;
  Var x = ad::Reshape(mel, static_cast<Eigen::Index>(height) * width, 1);
  for (const auto& stage : stages_) {
    auto out = stage.Forward(tape, x, height, width);
    x = out.y;
    height = out.height;
    width = out.width;
  }
  // [H*W x C] -> one row per time step.
  Var seq = ad::Reshape(x, height, width * x.cols());
  Var h = ad::ConcatCols({forward_gru_.Final(tape, seq, false), backward_gru_.Final(tape, seq, true)});
  return projection_.Forward(tape, h);
}

void EmotionExtractor::Collect(const std::string& prefix, nn::ParamRegistry* reg) {
  for (size_t s = 0; s < stages_.size(); ++s) stages_[s].Collect(prefix + ".conv" + std::to_string(s), reg);
  forward_gru_.Collect(prefix + ".gru_fw", reg);
  backward_gru_.Collect(prefix + ".gru_bw", reg);
  projection_.Collect(prefix + ".proj", reg);
}

// ---- EmotionEncoder -----------------------------------------------------------

EmotionEncoder::EmotionEncoder(const ModelConfig& cfg, int mel_bands, Rng& rng)
    : num_slots_(cfg.num_emotion_slots),
      num_labeled_(cfg.num_labeled_emotions),
      extractor_(cfg.extractor, mel_bands, rng),
      logit_head_(cfg.extractor.hidden_dim, cfg.num_emotion_slots, rng),
      speaker_classifier_(cfg.extractor.hidden_dim, cfg.num_speakers, rng) {}

Var EmotionEncoder::AdversarialLoss(Tape& tape, Var hidden, int speaker, double reversal_scale) const {
  if (speaker < 0 || speaker >= speaker_classifier_.out_dim()) {
    throw LabelError("speaker index " + std::to_string(speaker) + " out of range");
  }
  Var reversed = ad::GradientReversal(hidden, reversal_scale);
  return ad::CrossEntropy(speaker_classifier_.Forward(tape, reversed), speaker);
}

EmotionOutcome EmotionEncoder::Forward(Tape& tape, Var mel, int speaker, std::optional<int> label,
                                       const EmotionStepOptions& opts, Rng& rng) const {
  if (label && (*label < 0 || *label >= num_labeled_)) {
    throw LabelError("emotion label " + std::to_string(*label) + " outside [0, " +
                     std::to_string(num_labeled_) + ")");
  }
  EmotionOutcome out;
  out.hidden = Hidden(tape, mel);
  out.logits = Logits(tape, out.hidden);
  // Evaluation is noise-free so that the selected type is argmax(z).
  const Mat noise = opts.training ? SampleGumbel(num_slots_, rng) : Mat::Zero(1, num_slots_);
  out.soft = GumbelSoftmax(out.logits, noise, opts.tau);
  out.one_hot = StraightThroughOneHot(out.soft);
  Eigen::Index arg = 0;
  out.one_hot.value().row(0).maxCoeff(&arg);
  out.type_id = static_cast<int>(arg);
  // int = ModifiedSoftmax(z)[type_id], selected through the one-hot.
  out.intensity = ad::Sum(ad::Mul(ModifiedSoftmax(out.logits, opts.alpha),
                                  tape.Constant(out.one_hot.value())));
  out.adv_loss = AdversarialLoss(tape, out.hidden, speaker, opts.reversal_scale);
  out.labeled = label.has_value();
  out.emo_loss = out.labeled ? ad::CrossEntropy(out.logits, *label) : tape.Constant(Mat::Zero(1, 1));
  return out;
}

void EmotionEncoder::Collect(const std::string& prefix, nn::ParamRegistry* reg) {
  extractor_.Collect(prefix + ".extractor", reg);
  logit_head_.Collect(prefix + ".logits", reg);
  speaker_classifier_.Collect(prefix + ".speaker_classifier", reg);
}

}  // namespace emoxfer::model
