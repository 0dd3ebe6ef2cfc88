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

#ifndef EMOXFER_DSP_PROSODY_H_
#define EMOXFER_DSP_PROSODY_H_

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "emoxfer/core/tensor.h"

namespace emoxfer::dsp {

// Prosodic dimensions of a phoneme-level feature row.
enum ProsodyDim : int { kLogF0 = 0, kEnergy = 1, kLogDuration = 2 };
inline constexpr int kProsodyDims = 3;

struct PhonemeAlignment {
  std::vector<int> phoneme_ids;
  std::vector<int> durations;  // frames, each >= 1

  int TotalFrames() const;
  size_t size() const { return phoneme_ids.size(); }
};

// Mean of |frame_values| over each phoneme interval. With a voiced mask only
// voiced frames are averaged, and an interval without voiced frames takes
// the mean over all voiced frames of the utterance. Throws AlignmentError
// when the durations do not cover the frames exactly.
std::vector<double> PhonemeAverage(std::span<const double> frame_values,
                                   const PhonemeAlignment& alignment,
                                   const std::vector<bool>* voiced_mask = nullptr);

// Linearly interpolates log-F0 across unvoiced gaps that have voiced
// anchors on both sides. Returns the log-F0 track and the mask of frames
// that carry a value (voiced or interpolated).
struct LogF0Track {
  std::vector<double> log_f0;
  std::vector<bool> valid;
};
LogF0Track InterpolateLogF0(std::span<const double> f0_hz);

// Raw phoneme-level features [n_phonemes x 3]: mean log-F0, mean energy in
// dB, log(duration in frames). Throws DataError when no frame is voiced.
Mat PhonemeProsody(std::span<const double> f0_hz, std::span<const double> energy_db,
                   const PhonemeAlignment& alignment);

struct SpeakerStats {
  std::array<double, kProsodyDims> mean{};
  std::array<double, kProsodyDims> stddev{1.0, 1.0, 1.0};
};

// Single-pass (Welford) accumulation of per-dimension mean and population
// standard deviation over a speaker's training phonemes.
class SpeakerStatsAccumulator {
 public:
  void Add(const Mat& phoneme_features);
  // Standard deviations are clamped to at least |min_std|.
  SpeakerStats Finalize(double min_std = 1e-4) const;
  long count() const { return count_; }

 private:
  long count_ = 0;
  std::array<double, kProsodyDims> mean_{};
  std::array<double, kProsodyDims> m2_{};
};

// Per-dimension z-score and its inverse.
Mat NormalizeProsody(const Mat& features, const SpeakerStats& stats);
Mat DenormalizeProsody(const Mat& targets, const SpeakerStats& stats);

class SpeakerStatsTable {
 public:
  void Set(const std::string& speaker, const SpeakerStats& stats) { table_[speaker] = stats; }
  // Throws MissingStatsError for unknown speakers.
  const SpeakerStats& Get(const std::string& speaker) const;
  bool Contains(const std::string& speaker) const { return table_.count(speaker) != 0; }
  const std::map<std::string, SpeakerStats>& entries() const { return table_; }

  // Text file, one speaker per line:
  //   speaker<TAB>mean_logf0 std_logf0 mean_energy std_energy mean_logdur std_logdur
  void Save(const std::string& path) const;
  static SpeakerStatsTable Load(const std::string& path);

 private:
  std::map<std::string, SpeakerStats> table_;
};

}  // namespace emoxfer::dsp

#endif  // EMOXFER_DSP_PROSODY_H_
