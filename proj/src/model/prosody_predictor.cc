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

#include "emoxfer/model/prosody_predictor.h"

#include <algorithm>
#include <cmath>

#include "emoxfer/core/error.h"

namespace emoxfer::model {

ProsodyPredictor::ProsodyPredictor(const ModelConfig& cfg, Rng& rng) : dropout_(cfg.predictor_dropout) {
  for (int i = 0; i < cfg.predictor_layers; ++i) {
    convs_.emplace_back(cfg.model_dim, cfg.model_dim, cfg.predictor_kernel, rng);
    norms_.emplace_back(cfg.model_dim);
  }
  head_ = nn::Linear(cfg.model_dim, dsp::kProsodyDims, rng);
}

ad::Var ProsodyPredictor::Forward(ad::Tape& tape, ad::Var hidden, Rng& rng, bool training) const {
  if (hidden.rows() < 1) throw ShapeError("prosody predictor needs at least one phoneme");
  ad::Var x = hidden;
  for (size_t i = 0; i < convs_.size(); ++i) {
    x = norms_[i].Forward(tape, ad::Relu(convs_[i].Forward(tape, x)));
  }
  x = ad::Dropout(x, dropout_, rng, training);
  return head_.Forward(tape, x);
}

void ProsodyPredictor::Collect(const std::string& prefix, nn::ParamRegistry* reg) {
  for (size_t i = 0; i < convs_.size(); ++i) {
    convs_[i].Collect(prefix + ".conv" + std::to_string(i), reg);
    norms_[i].Collect(prefix + ".norm" + std::to_string(i), reg);
  }
  head_.Collect(prefix + ".head", reg);
}

ad::Var ProsodyLoss(ad::Var pred, ad::Var target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw ShapeError("prosody loss: prediction and target shapes differ");
  }
  return ad::Mean(ad::Square(ad::Sub(pred, target)));
}

RealizedProsody RealizeProsody(const Mat& normalized, const dsp::SpeakerStats& stats) {
  RealizedProsody out;
  out.physical = dsp::DenormalizeProsody(normalized, stats);
  out.durations.reserve(static_cast<size_t>(normalized.rows()));
  for (Eigen::Index i = 0; i < normalized.rows(); ++i) {
    const double frames = std::round(std::exp(out.physical(i, dsp::kLogDuration)));
    out.durations.push_back(static_cast<int>(std::clamp(frames, 1.0, 1e6)));
  }
  return out;
}

}  // namespace emoxfer::model
