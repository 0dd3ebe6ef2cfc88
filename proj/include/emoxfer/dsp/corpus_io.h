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

#ifndef EMOXFER_DSP_CORPUS_IO_H_
#define EMOXFER_DSP_CORPUS_IO_H_

#include <optional>
#include <string>
#include <vector>

#include "emoxfer/dsp/prosody.h"

namespace emoxfer::dsp {

struct UtteranceRecord {
  std::string audio_path;
  std::string speaker_id;
  std::vector<int> phoneme_ids;
  std::vector<int> durations;        // filled from the alignment file
  std::optional<int> emotion_label;  // absent for target speakers
};

// Tab-separated manifest:
//   audio_path<TAB>speaker_id<TAB>phoneme_ids<TAB>label_or_-
// Relative audio paths are resolved against the manifest's directory.
// |vocab_size| > 0 rejects phoneme IDs outside [0, vocab_size).
// Durations are left empty; see LoadAlignment.
std::vector<UtteranceRecord> LoadManifest(const std::string& path, int vocab_size = 0);

// Writes audio paths verbatim.
void WriteManifest(const std::string& path, const std::vector<UtteranceRecord>& records);

// <audio_path without extension>.ali
std::string AlignmentPathFor(const std::string& audio_path);

// One "phoneme_id duration_frames" per line.
PhonemeAlignment LoadAlignment(const std::string& path, int vocab_size = 0);
void WriteAlignment(const std::string& path, const PhonemeAlignment& alignment);

// Absorbs a rounding residue of at most |max_residue| frames into the final
// phoneme so that the durations sum to |num_frames|. Larger mismatches, or a
// final duration that would drop below one frame, raise AlignmentError.
PhonemeAlignment ReconcileAlignment(PhonemeAlignment alignment, int num_frames,
                                    int max_residue = 2);

}  // namespace emoxfer::dsp

#endif  // EMOXFER_DSP_CORPUS_IO_H_
