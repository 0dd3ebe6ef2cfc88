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

#include "emoxfer/training/objective.h"

#include <algorithm>
#include <cmath>

#include "emoxfer/core/error.h"

namespace emoxfer::training {

double WeightedTotal(const LossBreakdown& p, const LossWeights& w) {
  return p.l_mel + w.pros * p.l_pros + w.adv * p.l_adv_spk + w.emo * p.l_emo_source + p.commitment;
}

LossBreakdown CompositeLoss(const Mat& pred_mel, const Mat& true_mel, const Mat& pred_prosody,
                            const Mat& true_prosody, double adv_loss, double emo_loss, const LossWeights& w) {
  if (pred_mel.rows() != true_mel.rows() || pred_mel.cols() != true_mel.cols() || true_mel.size() == 0) {
    throw ShapeError("predicted and target mel shapes differ");
  }
  if (pred_prosody.rows() != true_prosody.rows() || pred_prosody.cols() != true_prosody.cols() ||
      true_prosody.size() == 0) {
    throw ShapeError("predicted and target prosody shapes differ");
  }
  LossBreakdown b;
  b.l_mel = (pred_mel - true_mel).cwiseAbs().mean();
  b.l_pros = (pred_prosody - true_prosody).array().square().mean();
  b.l_adv_spk = adv_loss;
  b.l_emo_source = emo_loss;
  b.total = WeightedTotal(b, w);
  return b;
}

double LearningRate(int step, int warmup, int width, double scale) {
  if (warmup < 1 || width < 1) throw ParameterError("warmup and width must be positive");
  const double s = std::max(step, 1);
  return scale * std::pow(width, -0.5) * std::min(std::pow(s, -0.5), s * std::pow(warmup, -1.5));
}

double GumbelTemperature(int step, const TrainConfig& cfg) {
  const double span = std::max(1.0, cfg.tau_anneal_fraction * cfg.max_steps);
  const double frac = std::min(static_cast<double>(std::max(step, 0)), span) / span;
  return cfg.tau_start * std::pow(cfg.tau_end / cfg.tau_start, frac);
}

double Median(std::vector<double> values) {
  if (values.empty()) throw ParameterError("median of an empty set");
  const size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<long>(mid), values.end());
  const double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  const double lo = *std::max_element(values.begin(), values.begin() + static_cast<long>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace emoxfer::training
