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

#ifndef EMOXFER_TRAINING_CHECKPOINT_H_
#define EMOXFER_TRAINING_CHECKPOINT_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "emoxfer/core/archive.h"
#include "emoxfer/dsp/prosody.h"
#include "emoxfer/model/transfer_model.h"
#include "emoxfer/training/optimizer.h"
#include "emoxfer/training/run_config.h"

namespace emoxfer::training {

// Everything besides parameters and optimizer moments.
struct CheckpointMeta {
  int step = 0;
  std::vector<std::string> speakers;  // index = timbre lookup row
  dsp::SpeakerStatsTable speaker_stats;
  // Per labeled emotion; NaN when the emotion had no training utterance.
  std::vector<double> intensity_medians;
};

// Sections: one per model parameter group, "vq" (quantizer EMA state),
// "optimizer" (when |adam| is given) and "metadata".
void SaveCheckpoint(const std::string& path, const RunConfig& cfg, model::EmotionTransferModel& model,
                    const Adam* adam, const CheckpointMeta& meta);

struct Checkpoint {
  RunConfig config;
  std::string config_hash;  // as stored
  CheckpointMeta meta;
  TensorArchive archive{""};
  std::vector<std::string> warnings;
};

// Throws CheckpointError on unreadable files or a missing metadata section.
// A stored hash that does not match the stored config adds a warning.
Checkpoint ReadCheckpoint(const std::string& path);
// Throws CheckpointError when a section or tensor is missing or misshapen.
void RestoreModel(const Checkpoint& ckpt, model::EmotionTransferModel* model);
void RestoreOptimizer(const Checkpoint& ckpt, Adam* adam);
// Warning text when the checkpoint was written under a different config.
std::optional<std::string> HashWarning(const Checkpoint& ckpt, const RunConfig& expected);

struct LoadedModel {
  Checkpoint checkpoint;
  std::unique_ptr<model::EmotionTransferModel> model;
};
// Builds the model from the stored config and restores it.
LoadedModel LoadModel(const std::string& path);

}  // namespace emoxfer::training

#endif  // EMOXFER_TRAINING_CHECKPOINT_H_
