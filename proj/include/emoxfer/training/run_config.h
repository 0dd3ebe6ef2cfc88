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

#ifndef EMOXFER_TRAINING_RUN_CONFIG_H_
#define EMOXFER_TRAINING_RUN_CONFIG_H_

#include <cstdint>
#include <string>

#include "emoxfer/model/config.h"

namespace emoxfer::training {

struct TrainConfig {
  int batch_size = 32;
  int max_steps = 3000;
  double lambda_pros = 0.8;  // lambda_1
  double lambda_adv = 0.01;  // lambda_2
  double lambda_emo = 0.5;   // lambda_3
  double tau_start = 1.0;
  double tau_end = 0.1;
  double tau_anneal_fraction = 0.8;
  int warmup_steps = 4000;
  double lr_scale = 1.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.98;
  double adam_eps = 1e-9;
  double grad_clip = 1.0;
  int checkpoint_every = 0;  // 0: only at the end

  void Validate() const;
};

struct RunConfig {
  uint64_t seed = 1;
  model::ModelConfig model;
  TrainConfig train;

  void Validate() const;
  // Desk-scale widths and schedule.
  static RunConfig Toy();
};

// JSON with the layout {"seed", "model": {..., "extractor", "timbre"},
// "train": {...}}. Missing keys keep their defaults; unknown keys raise
// ConfigError.
RunConfig ParseRunConfig(const std::string& json_text);
RunConfig LoadRunConfig(const std::string& path);
// Canonical form: every key, sorted, one line.
std::string DumpRunConfig(const RunConfig& cfg);
// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string ConfigHash(const RunConfig& cfg);

}  // namespace emoxfer::training

#endif  // EMOXFER_TRAINING_RUN_CONFIG_H_
