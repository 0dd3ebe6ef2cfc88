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

#ifndef EMOXFER_TRAINING_CORPUS_H_
#define EMOXFER_TRAINING_CORPUS_H_

#include <optional>
#include <string>
#include <vector>

#include "emoxfer/core/tensor.h"
#include "emoxfer/dsp/corpus_io.h"
#include "emoxfer/dsp/prosody.h"
#include "emoxfer/model/transfer_model.h"

namespace emoxfer::training {

// Acoustic features of one utterance in physical units.
struct PreparedUtterance {
  std::string id;  // audio file stem
  std::string speaker;
  std::vector<int> phoneme_ids;
  std::vector<int> durations;  // reconciled with the mel frame count
  std::optional<int> label;
  Mat log_mel;  // [T x 80]
  Mat prosody;  // [n x 3]: log-F0, energy dB, log duration
};

// Reads the audio and derives mel, frame prosody and phoneme prosody.
// |record.durations| must be filled. Values are rounded to float32.
PreparedUtterance PrepareUtterance(const dsp::UtteranceRecord& record);

struct PreparedCorpus {
  std::vector<PreparedUtterance> utterances;
  std::vector<std::string> speakers;  // sorted; index = speaker id
  dsp::SpeakerStatsTable stats;       // per-speaker prosody statistics
  Mat mel_mean;                       // [1 x 80]
  Mat mel_std;                        // [1 x 80]

  // -1 when unknown.
  int SpeakerIndex(const std::string& speaker) const;

  void Save(const std::string& path) const;
  static PreparedCorpus Load(const std::string& path);
};

// Fills missing durations from the alignment files next to the audio.
// Throws AlignmentError when an alignment disagrees with the manifest.
std::vector<dsp::UtteranceRecord> AttachAlignments(std::vector<dsp::UtteranceRecord> records,
                                                   int vocab_size = 0);

// Features of every record plus per-speaker prosody statistics and global
// per-band mel statistics (population std floored at 1e-3).
PreparedCorpus PrepareCorpus(const std::vector<dsp::UtteranceRecord>& records);
// LoadManifest + AttachAlignments + PrepareCorpus.
PreparedCorpus PrepareManifest(const std::string& manifest_path, int vocab_size = 0);

// Normalized training examples: mel by the corpus band statistics, prosody
// by each speaker's statistics. Rounded to float32.
std::vector<model::TrainingExample> BuildExamples(const PreparedCorpus& corpus);

// Mel normalization shared by training and evaluation.
Mat NormalizeMelWith(const Mat& log_mel, const Mat& mean, const Mat& stddev);

}  // namespace emoxfer::training

#endif  // EMOXFER_TRAINING_CORPUS_H_
