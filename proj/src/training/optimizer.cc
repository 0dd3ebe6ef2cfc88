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

#include "emoxfer/training/optimizer.h"

#include <cmath>

namespace emoxfer::training {

Adam::Adam(const nn::ParamRegistry& params, const AdamConfig& cfg) : params_(params), cfg_(cfg) {
  for (const auto& [name, p] : params_.entries()) {
    m_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
  }
}

void Adam::Step(double lr) {
  ++steps_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, steps_);
  const double c2 = 1.0 - std::pow(cfg_.beta2, steps_);
  const auto& entries = params_.entries();
  for (size_t i = 0; i < entries.size(); ++i) {
    ad::Parameter* p = entries[i].second;
    Mat& m = m_[i];
    Mat& v = v_[i];
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * p->grad;
    v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * p->grad.cwiseProduct(p->grad);
    RoundToFloat(&m);
    RoundToFloat(&v);
    p->value.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg_.eps);
    RoundToFloat(&p->value);
  }
}

double GradientNorm(const nn::ParamRegistry& params) {
  double sq = 0.0;
  for (const auto& [name, p] : params.entries()) sq += p->grad.squaredNorm();
  return std::sqrt(sq);
}

double ClipGradients(const nn::ParamRegistry& params, double max_norm) {
  const double norm = GradientNorm(params);
  if (norm > max_norm) {
    const double s = max_norm / norm;
    for (const auto& [name, p] : params.entries()) p->grad *= s;
  }
  return norm;
}

}  // namespace emoxfer::training
