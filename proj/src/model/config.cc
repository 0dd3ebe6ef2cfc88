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

#include "emoxfer/model/config.h"

#include "emoxfer/core/error.h"

namespace emoxfer::model {

void ModelConfig::Validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(vocab_size >= 1, "vocab_size must be positive");
  require(num_speakers >= 1, "num_speakers must be positive");
  require(num_labeled_emotions >= 1, "num_labeled_emotions must be positive");
  require(num_emotion_slots >= num_labeled_emotions, "num_emotion_slots must be >= num_labeled_emotions");
  require(alpha > 1.0 && alpha <= 10.0, "alpha must lie in (1, 10]");
  require(model_dim >= 2 && model_dim % attention_heads == 0, "model_dim must be divisible by attention_heads");
  require(ffn_filter >= 1 && ffn_kernel % 2 == 1, "ffn_kernel must be odd");
  require(encoder_blocks >= 1 && decoder_blocks >= 1, "need at least one FFT block per stack");
  require(predictor_layers >= 1 && predictor_kernel % 2 == 1, "predictor_kernel must be odd");
  require(predictor_dropout >= 0.0 && predictor_dropout < 1.0, "predictor_dropout must lie in [0, 1)");
  for (int c : extractor.channels) require(c >= 1, "extractor channels must be positive");
  require(extractor.time_strided_stages >= 0 && extractor.time_strided_stages <= 5,
          "time_strided_stages must lie in [0, 5]");
  require(extractor.gru_hidden >= 1 && extractor.hidden_dim >= 1, "extractor widths must be positive");
  require(timbre.codebook_size >= 2, "codebook_size must be at least 2");
  require(timbre.groups >= 1 && model_dim % timbre.groups == 0, "model_dim must be divisible by groups");
  require(timbre.ema_decay > 0.0 && timbre.ema_decay < 1.0, "ema_decay must lie in (0, 1)");
  require(timbre.commitment >= 0.0, "commitment must be non-negative");
  require(timbre.lstm_hidden >= 1 && timbre.recent_buffer >= 1 && timbre.dead_code_steps >= 1,
          "timbre sizes must be positive");
}

ModelConfig ModelConfig::Toy() {
  ModelConfig c;
  c.model_dim = 32;
  c.ffn_filter = 64;
  c.encoder_blocks = 2;
  c.decoder_blocks = 2;
  c.extractor.channels = {8, 8, 16, 16, 16};
  c.extractor.gru_hidden = 32;
  c.extractor.hidden_dim = 32;
  c.timbre.lstm_hidden = 32;
  return c;
}

const char* TimbreModeName(TimbreMode mode) {
  return mode == TimbreMode::kLookup ? "lookup" : "zero_shot";
}

TimbreMode ParseTimbreMode(const std::string& name) {
  if (name == "lookup") return TimbreMode::kLookup;
  if (name == "zero_shot") return TimbreMode::kZeroShot;
  throw ConfigError("unknown timbre mode '" + name + "'");
}

}  // namespace emoxfer::model
