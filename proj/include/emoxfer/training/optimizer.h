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

#ifndef EMOXFER_TRAINING_OPTIMIZER_H_
#define EMOXFER_TRAINING_OPTIMIZER_H_

#include <vector>

#include "emoxfer/core/nn.h"

namespace emoxfer::training {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-9;
};

// Adam with bias correction. Parameters and moments are rounded to float32
// after every update so that the whole state survives a float32 checkpoint
// exactly.
class Adam {
 public:
  Adam(const nn::ParamRegistry& params, const AdamConfig& cfg);

  void Step(double lr);

  int steps() const { return steps_; }
  void set_steps(int steps) { steps_ = steps; }
  std::vector<Mat>& first_moments() { return m_; }
  std::vector<Mat>& second_moments() { return v_; }
  const std::vector<Mat>& first_moments() const { return m_; }
  const std::vector<Mat>& second_moments() const { return v_; }
  const nn::ParamRegistry& params() const { return params_; }

 private:
  nn::ParamRegistry params_;
  AdamConfig cfg_;
  int steps_ = 0;
  std::vector<Mat> m_;
  std::vector<Mat> v_;
};

// Global L2 norm of all gradients.
double GradientNorm(const nn::ParamRegistry& params);
// Rescales gradients so the global norm is at most |max_norm|. Returns the
// norm before clipping.
double ClipGradients(const nn::ParamRegistry& params, double max_norm);

}  // namespace emoxfer::training

#endif  // EMOXFER_TRAINING_OPTIMIZER_H_
