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

#ifndef EMOXFER_SER_SER_H_
#define EMOXFER_SER_SER_H_

#include <memory>
#include <string>
#include <vector>

#include "emoxfer/core/nn.h"
#include "emoxfer/model/config.h"
#include "emoxfer/model/emotion_encoder.h"
#include "emoxfer/training/corpus.h"

// Standalone speech-emotion classifier and the intensity analyses built on
// its posteriors.
namespace emoxfer::ser {

// Same extractor architecture as the emotion encoder (separate parameters)
// plus an affine head over the classes.
class SerModel {
 public:
  // |class_labels| maps class index -> corpus label.
  SerModel(const model::ExtractorConfig& cfg, std::vector<int> class_labels, uint64_t seed);
  SerModel(const SerModel&) = delete;
  SerModel& operator=(const SerModel&) = delete;

  int n_classes() const { return static_cast<int>(labels_.size()); }
  const std::vector<int>& class_labels() const { return labels_; }
  // Class index of a corpus label, or -1.
  int ClassOf(int label) const;
  const model::ExtractorConfig& config() const { return cfg_; }

  // Per-band statistics used to normalize input log-mels.
  void SetMelStats(const Mat& mean, const Mat& stddev);
  Mat Normalize(const Mat& log_mel) const;

  // On a normalized mel.
  ad::Var Logits(ad::Tape& tape, ad::Var mel) const;
  // On a physical log-mel.
  Vec Logits(const Mat& log_mel) const;
  Vec Posterior(const Mat& log_mel) const;  // softmax of the logits
  Vec Hidden(const Mat& log_mel) const;     // [d_h]

  const nn::ParamRegistry& params() const { return params_; }

  void Save(const std::string& path) const;
  static std::unique_ptr<SerModel> Load(const std::string& path);

 private:
  model::ExtractorConfig cfg_;
  std::vector<int> labels_;
  model::EmotionExtractor extractor_;
  nn::Linear head_;
  nn::ParamRegistry params_;
  Mat mel_mean_;
  Mat mel_std_;
};

struct SerTrainConfig {
  int steps = 600;
  int batch_size = 8;
  double learning_rate = 2e-3;
  double holdout_fraction = 0.2;  // per class
  uint64_t seed = 1;
};

struct SerTrainResult {
  int train_count = 0;
  int heldout_count = 0;
  double initial_loss = 0.0;  // mean training cross-entropy before any update
  double final_loss = 0.0;
  double heldout_accuracy = 0.0;
};

// Trains on the labeled utterances of |data| (unlabeled ones are ignored)
// with a seeded per-class held-out split. Throws DataError with fewer than
// two classes.
std::unique_ptr<SerModel> TrainSer(const std::vector<training::PreparedUtterance>& data,
                                   const model::ExtractorConfig& cfg, const SerTrainConfig& tc,
                                   SerTrainResult* result = nullptr);

// Histograms of the modified-softmax intensity at each utterance's predicted
// class, per alpha and predicted class, over equal bins of [0, 1].
struct IntensityReport {
  std::vector<double> alphas;
  std::vector<int> class_labels;
  int bins = 20;
  std::vector<std::vector<std::vector<int>>> counts;  // [alpha][class][bin]
  int utterances = 0;

  int Mass(size_t alpha_index) const;
  // alpha<TAB>label<TAB>bin_lo<TAB>bin_hi<TAB>count, with a header line.
  void Save(const std::string& path) const;
  static IntensityReport Load(const std::string& path);
};

IntensityReport IntensitySweep(const SerModel& model, const std::vector<training::PreparedUtterance>& utterances,
                               const std::vector<double>& alphas = {1.01, 1.2, 2.0}, int bins = 20);

struct SpeakerLabelRow {
  std::string speaker;
  int utterances = 0;
  std::vector<double> percent;  // per class, sums to 100
};

struct LabelReport {
  std::vector<int> class_labels;
  std::vector<SpeakerLabelRow> rows;
  std::vector<std::string> warnings;

  // speaker<TAB>utterances<TAB>percent per class, with a header line.
  void Save(const std::string& path) const;
};

// Predicted-class percentages per speaker. With |speakers| given, exactly
// those speakers are reported in that order and speakers without
// utterances are omitted with a warning; otherwise every speaker in
// |utterances| is reported, sorted.
LabelReport MakeLabelReport(const SerModel& model, const std::vector<training::PreparedUtterance>& utterances,
                            const std::vector<std::string>& speakers = {});

// Hidden features as a float32 matrix plus an index of "id<TAB>speaker<TAB>label".
void ExportHidden(const SerModel& model, const std::vector<training::PreparedUtterance>& utterances,
                  const std::string& matrix_path, const std::string& index_path);

}  // namespace emoxfer::ser

#endif  // EMOXFER_SER_SER_H_
