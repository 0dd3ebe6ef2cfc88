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

#ifndef EMOXFER_MODEL_TRANSFER_MODEL_H_
#define EMOXFER_MODEL_TRANSFER_MODEL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "emoxfer/core/nn.h"
#include "emoxfer/dsp/prosody.h"
#include "emoxfer/model/acoustic_model.h"
#include "emoxfer/model/config.h"
#include "emoxfer/model/emotion_encoder.h"
#include "emoxfer/model/prosody_predictor.h"
#include "emoxfer/model/timbre_encoder.h"

namespace emoxfer::model {

inline constexpr int kMelBands = 80;

// One preprocessed utterance. |mel| and |prosody| are already normalized
// (global per-band mel statistics, per-speaker prosody statistics).
struct TrainingExample {
  std::string id;
  std::vector<int> phoneme_ids;
  std::vector<int> durations;
  Mat mel;      // [T x 80]
  Mat prosody;  // [n x 3]
  int speaker = 0;
  std::optional<int> label;
};

struct ForwardOptions {
  double alpha = 1.2;
  double tau = 1.0;
  bool training = true;
  double reversal_scale = 1.0;
  // The emotion table consumes the straight-through one-hot; when false it
  // consumes the soft Gumbel sample instead.
  bool straight_through = true;
  // Zero-shot mode only: when false the embedding bypasses the quantizer
  // (the commitment term is still computed).
  bool quantize = true;
};

struct ForwardResult {
  ad::Var l_mel;        // MAE over frames x bands
  ad::Var l_pros;       // MSE over phonemes x 3
  ad::Var l_adv;        // speaker cross-entropy (reversed below the classifier)
  ad::Var l_emo;        // emotion cross-entropy, 0 when unlabeled
  ad::Var commitment;   // VQ commitment, 0 in lookup mode
  ad::Var pred_mel;
  ad::Var pred_prosody;
  ad::Var prosody_input;  // hidden sequence seen by the prosody predictor
  ad::Var timbre;
  EmotionOutcome emotion;
};

struct SynthesisResult {
  Mat mel_normalized;
  Mat mel;  // log-mel in physical units
  Mat prosody_normalized;
  RealizedProsody prosody;
};

// Every named parameter group of the model, in checkpoint order.
struct ParamSection {
  std::string name;
  nn::ParamRegistry params;
};

class EmotionTransferModel {
 public:
  EmotionTransferModel(const ModelConfig& cfg, uint64_t seed);
  EmotionTransferModel(const EmotionTransferModel&) = delete;
  EmotionTransferModel& operator=(const EmotionTransferModel&) = delete;

  const ModelConfig& config() const { return cfg_; }

  // Teacher-forced forward of one utterance. Not const: in zero-shot
  // training mode the VQ queues its EMA statistics.
  ForwardResult Forward(ad::Tape& tape, const TrainingExample& ex, const ForwardOptions& opts, Rng& rng);

  // Timbre encodings (eval mode).
  Mat LookupTimbre(int speaker) const;
  Mat TimbreFromMel(const Mat& mel_normalized);
  Mat AverageTimbreFromMels(const std::vector<Mat>& mels_normalized);

  // Emotion logits of an utterance (eval mode).
  Vec EmotionLogits(const Mat& mel_normalized) const;

  // Inference chain: encode -> emotion -> predict prosody -> realize with
  // the target statistics -> inject predicted prosody -> regulate -> add
  // timbre -> decode. Deterministic.
  SynthesisResult Synthesize(const std::vector<int>& phoneme_ids, int type_id, double intensity,
                             const Mat& timbre, const dsp::SpeakerStats& target_stats) const;

  // Per-band global mel statistics.
  Mat NormalizeMel(const Mat& log_mel) const;
  Mat DenormalizeMel(const Mat& normalized) const;
  void SetMelStats(const Mat& mean, const Mat& stddev);
  const Mat& mel_mean() const { return mel_mean_; }
  const Mat& mel_std() const { return mel_std_; }

  std::vector<ParamSection>& sections() { return sections_; }
  const nn::ParamRegistry& all_params() const { return all_; }
  const ParamSection& section(const std::string& name) const;

  EmotionEncoder& emotion_encoder() { return emotion_; }
  const EmotionEncoder& emotion_encoder() const { return emotion_; }
  ProsodyPredictor& prosody_predictor() { return predictor_; }
  PhonemeEncoder& phoneme_encoder() { return encoder_; }
  MelDecoder& decoder() { return decoder_; }
  EmotionTable& emotion_table() { return table_; }
  ProsodyInjection& prosody_injection() { return injection_; }
  TimbreLookup& timbre_lookup() { return lookup_; }
  SpeakerEmbedder& speaker_embedder() { return embedder_; }
  GroupedVq& vq() { return vq_; }
  const GroupedVq& vq() const { return vq_; }

 private:
  ad::Var TrainingTimbre(ad::Tape& tape, const TrainingExample& ex, const ForwardOptions& opts,
                         ad::Var* commitment);

  ModelConfig cfg_;
  EmotionEncoder emotion_;
  ProsodyPredictor predictor_;
  PhonemeEncoder encoder_;
  MelDecoder decoder_;
  EmotionTable table_;
  ProsodyInjection injection_;
  TimbreLookup lookup_;
  SpeakerEmbedder embedder_;
  GroupedVq vq_;
  Mat mel_mean_;
  Mat mel_std_;

  std::vector<ParamSection> sections_;
  nn::ParamRegistry all_;
};

}  // namespace emoxfer::model

#endif  // EMOXFER_MODEL_TRANSFER_MODEL_H_
