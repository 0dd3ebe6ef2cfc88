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

#ifndef EMOXFER_EVAL_TRANSFER_EVAL_H_
#define EMOXFER_EVAL_TRANSFER_EVAL_H_

#include <map>
#include <string>
#include <vector>

#include "emoxfer/dsp/prosody.h"
#include "emoxfer/model/transfer_model.h"
#include "emoxfer/toy/toy_corpus.h"
#include "emoxfer/training/checkpoint.h"
#include "emoxfer/training/corpus.h"

namespace emoxfer::eval {

// What synthesis needs to speak in a speaker's voice.
struct TargetVoice {
  std::string name;
  Mat timbre;  // [1 x model_dim]
  dsp::SpeakerStats stats;
};

// Speaker seen in training: lookup timbre and stored statistics.
TargetVoice SeenVoice(const model::EmotionTransferModel& model, const training::CheckpointMeta& meta,
                      const std::string& speaker);
// Unseen speaker: averaged quantized timbre of |refs| and prosody statistics
// from the same references.
TargetVoice ZeroShotVoice(model::EmotionTransferModel& model, const std::string& speaker,
                          const std::vector<training::PreparedUtterance>& refs);
// The first |count| utterances of |speaker| in |corpus|.
std::vector<training::PreparedUtterance> ReferenceUtterances(const training::PreparedCorpus& corpus,
                                                             const std::string& speaker, int count);

// Mean envelope of every speaker's utterances.
std::map<std::string, Vec> SpeakerEnvelopes(const training::PreparedCorpus& corpus);

// Seeded random phoneme sequences of the toy corpus' length.
std::vector<std::vector<int>> TestSentences(const toy::ToyCorpusSpec& spec, int count, uint64_t seed);

struct PairResult {
  std::string target;
  int emotion = 0;
  std::vector<double> correlations;     // F0 proxy vs template, per sentence
  std::vector<double> target_distance;  // envelope distance to the target
  std::vector<double> source_distance;  // to the nearest source speaker
  double median_correlation = 0.0;
  double mean_target_distance = 0.0;
  // Distances of the pair's mean envelope.
  double pooled_target_distance = 0.0;
  double pooled_source_distance = 0.0;
  bool emotion_ok = false;  // median correlation > 0.8
  bool speaker_ok = false;  // pooled envelope nearer the target than any source
};

struct TransferReport {
  std::vector<PairResult> pairs;
  double mean_correlation = 0.0;      // over pairs of the median
  double mean_target_distance = 0.0;  // over pairs
  bool all_ok = false;
};

struct TransferEvalOptions {
  int sentences = 10;
  uint64_t seed = 4242;
  // Negative: use the stored median of each emotion ("moderate").
  double intensity = -1.0;
};

// Every (target, emotion) pair where the target never recorded the emotion.
TransferReport EvaluateTransfer(const model::EmotionTransferModel& model, const training::CheckpointMeta& meta,
                                const toy::ToyCorpus& toy, const std::vector<TargetVoice>& voices,
                                const std::map<std::string, Vec>& envelopes, const TransferEvalOptions& opts);

struct IntensityOrderResult {
  int emotion = 0;
  int sentences = 0;
  int monotone = 0;  // Spearman(levels, deviation) == 1
  double Fraction() const { return sentences > 0 ? static_cast<double>(monotone) / sentences : 0.0; }
};

// Realized prosody deviation from each target's mean at intensities 0.1,
// the stored median and 1.0, per transferred emotion.
std::vector<IntensityOrderResult> EvaluateIntensityOrder(const model::EmotionTransferModel& model,
                                                         const training::CheckpointMeta& meta,
                                                         const toy::ToyCorpus& toy,
                                                         const std::vector<TargetVoice>& voices,
                                                         const TransferEvalOptions& opts);

}  // namespace emoxfer::eval

#endif  // EMOXFER_EVAL_TRANSFER_EVAL_H_
