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

#ifndef EMOXFER_MODEL_CONFIG_H_
#define EMOXFER_MODEL_CONFIG_H_

#include <array>
#include <string>

namespace emoxfer::model {

struct ExtractorConfig {
  // Output channels of the five Conv-Norm stages.
  std::array<int, 5> channels{32, 32, 64, 64, 128};
  // Stages (from the first) that also stride along time.
  int time_strided_stages = 3;
  int gru_hidden = 128;
  int hidden_dim = 128;  // d_h
};

enum class TimbreMode { kLookup, kZeroShot };

struct TimbreConfig {
  TimbreMode mode = TimbreMode::kLookup;
  int lstm_hidden = 256;
  int codebook_size = 32;  // K
  int groups = 4;          // G
  double commitment = 0.25;
  double ema_decay = 0.99;
  int dead_code_steps = 1000;
  int recent_buffer = 512;
};

struct ModelConfig {
  int vocab_size = 64;
  int num_speakers = 1;
  int num_emotion_slots = 10;  // M
  int num_labeled_emotions = 8;  // N
  double alpha = 1.2;

  int model_dim = 256;
  int attention_heads = 2;
  int ffn_filter = 1024;
  int ffn_kernel = 3;
  int encoder_blocks = 4;
  int decoder_blocks = 4;

  int predictor_layers = 6;
  int predictor_kernel = 3;
  double predictor_dropout = 0.2;

  ExtractorConfig extractor;
  TimbreConfig timbre;

  // Throws ConfigError on inconsistent settings.
  void Validate() const;

  // Widths used for desk-scale experiments.
  static ModelConfig Toy();
};

const char* TimbreModeName(TimbreMode mode);
TimbreMode ParseTimbreMode(const std::string& name);

}  // namespace emoxfer::model

#endif  // EMOXFER_MODEL_CONFIG_H_
