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

#ifndef EMOXFER_MODEL_ACOUSTIC_MODEL_H_
#define EMOXFER_MODEL_ACOUSTIC_MODEL_H_

#include <string>
#include <vector>

#include "emoxfer/core/nn.h"
#include "emoxfer/model/config.h"

namespace emoxfer::model {

// Embedding lookup + sinusoidal positions + FFT blocks.
class PhonemeEncoder {
 public:
  PhonemeEncoder() = default;
  PhonemeEncoder(const ModelConfig& cfg, Rng& rng);
  // [n x model_dim]; throws LabelError for ids outside the vocabulary.
  ad::Var Forward(ad::Tape& tape, const std::vector<int>& phoneme_ids) const;
  void Collect(const std::string& prefix, nn::ParamRegistry* reg);

 private:
  ad::Parameter embedding_;  // [vocab x dim]
  std::vector<nn::FftBlock> blocks_;
};

// Positions + FFT blocks + linear projection to the mel bands.
class MelDecoder {
 public:
  MelDecoder() = default;
  MelDecoder(const ModelConfig& cfg, int mel_bands, Rng& rng);
  ad::Var Forward(ad::Tape& tape, ad::Var frames) const;
  void Collect(const std::string& prefix, nn::ParamRegistry* reg);

 private:
  std::vector<nn::FftBlock> blocks_;
  nn::Linear out_;
};

// Emotion table [M x dim]. The encoding is row * intensity; in training the
// row is selected by multiplying the straight-through one-hot with the table.
class EmotionTable {
 public:
  EmotionTable() = default;
  EmotionTable(int slots, int dim, Rng& rng);
  ad::Var Encode(ad::Tape& tape, ad::Var one_hot, ad::Var intensity) const;
  ad::Var Encode(ad::Tape& tape, int type_id, double intensity) const;
  void Collect(const std::string& prefix, nn::ParamRegistry* reg);
  ad::Parameter& table() { return table_; }

 private:
  ad::Parameter table_;
};

// 1-D convolution (kernel 3) lifting the 3 prosodic dimensions to the model
// width; the result is added to the hidden sequence.
class ProsodyInjection {
 public:
  ProsodyInjection() = default;
  ProsodyInjection(int dim, Rng& rng, bool use_bias = true);
  ad::Var Forward(ad::Tape& tape, ad::Var hidden, ad::Var prosody) const;
  void Collect(const std::string& prefix, nn::ParamRegistry* reg);
  nn::Conv1d& conv() { return conv_; }

 private:
  nn::Conv1d conv_;
};

// h + e broadcast over phonemes.
ad::Var ComposeHidden(ad::Var phonemes, ad::Var emotion);
// Row i repeated durations[i] times; throws AlignmentError for durations
// below one or a count mismatch.
ad::Var LengthRegulate(ad::Var hidden, const std::vector<int>& durations);
// f + t broadcast over frames.
ad::Var AddTimbre(ad::Var frames, ad::Var timbre);

}  // namespace emoxfer::model

#endif  // EMOXFER_MODEL_ACOUSTIC_MODEL_H_
