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

#include "emoxfer/model/acoustic_model.h"

#include <cmath>

#include "emoxfer/core/error.h"

namespace emoxfer::model {

PhonemeEncoder::PhonemeEncoder(const ModelConfig& cfg, Rng& rng) : embedding_(cfg.vocab_size, cfg.model_dim) {
  nn::UniformInit(&embedding_, 0.1 * std::sqrt(3.0), rng);
  for (int i = 0; i < cfg.encoder_blocks; ++i) {
    blocks_.emplace_back(cfg.model_dim, cfg.attention_heads, cfg.ffn_filter, cfg.ffn_kernel, rng);
  }
}

ad::Var PhonemeEncoder::Forward(ad::Tape& tape, const std::vector<int>& ids) const {
  if (ids.empty()) throw ShapeError("empty phoneme sequence");
  for (int id : ids) {
    if (id < 0 || id >= embedding_.value.rows()) throw LabelError("unknown phoneme id " + std::to_string(id));
  }
  const int n = static_cast<int>(ids.size());
  ad::Var x = ad::GatherRows(tape.Param(embedding_), ids);
  x = ad::Add(x, tape.Constant(nn::SinusoidalPositions(n, static_cast<int>(embedding_.value.cols()))));
  for (const auto& b : blocks_) x = b.Forward(tape, x);
  return x;
}

void PhonemeEncoder::Collect(const std::string& prefix, nn::ParamRegistry* reg) {
  reg->Add(prefix + ".embedding", &embedding_);
  for (size_t i = 0; i < blocks_.size(); ++i) blocks_[i].Collect(prefix + ".block" + std::to_string(i), reg);
}

MelDecoder::MelDecoder(const ModelConfig& cfg, int mel_bands, Rng& rng) {
  for (int i = 0; i < cfg.decoder_blocks; ++i) {
    blocks_.emplace_back(cfg.model_dim, cfg.attention_heads, cfg.ffn_filter, cfg.ffn_kernel, rng);
  }
  out_ = nn::Linear(cfg.model_dim, mel_bands, rng);
}

ad::Var MelDecoder::Forward(ad::Tape& tape, ad::Var frames) const {
  ad::Var x = ad::Add(frames, tape.Constant(nn::SinusoidalPositions(static_cast<int>(frames.rows()),
                                                                      static_cast<int>(frames.cols()))));
  for (const auto& b : blocks_) x = b.Forward(tape, x);
  return out_.Forward(tape, x);
}

void MelDecoder::Collect(const std::string& prefix, nn::ParamRegistry* reg) {
  for (size_t i = 0; i < blocks_.size(); ++i) blocks_[i].Collect(prefix + ".block" + std::to_string(i), reg);
  out_.Collect(prefix + ".out", reg);
}

EmotionTable::EmotionTable(int slots, int dim, Rng& rng) : table_(slots, dim) {
  nn::UniformInit(&table_, 0.1 * std::sqrt(3.0), rng);
}

ad::Var EmotionTable::Encode(ad::Tape& tape, ad::Var one_hot, ad::Var intensity) const {
  if (one_hot.rows() != 1 || one_hot.cols() != table_.value.rows()) throw ShapeError("one-hot width must equal M");
  return ad::ScaleBy(ad::MatMul(one_hot, tape.Param(table_)), intensity);
}

ad::Var EmotionTable::Encode(ad::Tape& tape, int type_id, double intensity) const {
  if (type_id < 0 || type_id >= table_.value.rows()) throw LabelError("emotion type id out of range");
  if (intensity < 0.0 || intensity > 1.0) throw ParameterError("intensity must lie in [0, 1]");
  return ad::Scale(ad::GatherRows(tape.Param(table_), {type_id}), intensity);
}

void EmotionTable::Collect(const std::string& prefix, nn::ParamRegistry* reg) {
  reg->Add(prefix + ".table", &table_);
}

ProsodyInjection::ProsodyInjection(int dim, Rng& rng, bool use_bias) : conv_(3, dim, 3, rng, use_bias) {}

ad::Var ProsodyInjection::Forward(ad::Tape& tape, ad::Var hidden, ad::Var prosody) const {
  if (hidden.rows() != prosody.rows()) throw ShapeError("prosody and hidden sequence lengths differ");
  return ad::Add(hidden, conv_.Forward(tape, prosody));
}

void ProsodyInjection::Collect(const std::string& prefix, nn::ParamRegistry* reg) { conv_.Collect(prefix + ".conv", reg); }

ad::Var ComposeHidden(ad::Var phonemes, ad::Var emotion) { return ad::AddRowBroadcast(phonemes, emotion); }

ad::Var LengthRegulate(ad::Var hidden, const std::vector<int>& durations) {
  if (static_cast<Eigen::Index>(durations.size()) != hidden.rows()) {
    throw AlignmentError("one duration per phoneme required");
  }
  for (int d : durations) {
    if (d < 1) throw AlignmentError("durations must be at least one frame");
  }
  return ad::RepeatRows(hidden, durations);
}

ad::Var AddTimbre(ad::Var frames, ad::Var timbre) { return ad::AddRowBroadcast(frames, timbre); }

}  // namespace emoxfer::model
