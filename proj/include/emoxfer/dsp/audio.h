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

#ifndef EMOXFER_DSP_AUDIO_H_
#define EMOXFER_DSP_AUDIO_H_

#include <string>
#include <vector>

namespace emoxfer::dsp {

inline constexpr int kSampleRate = 16000;

struct AudioClip {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  double DurationSeconds() const {
    return static_cast<double>(samples.size()) / static_cast<double>(sample_rate);
  }
};

// Throws DataError on non-finite samples or a non-positive sample rate.
void ValidateClip(const AudioClip& clip);

// Windowed-sinc resampling to |target_rate|.
AudioClip Resample(const AudioClip& clip, int target_rate);

// Reads 16-bit PCM or 32-bit float WAV (mono, or channel-averaged), rejects
// clips whose peak exceeds 1.0, and resamples to kSampleRate.
AudioClip ReadWav(const std::string& path);
// Writes 16-bit PCM mono. Samples are clipped to [-1, 1].
void WriteWav(const std::string& path, const AudioClip& clip);

}  // namespace emoxfer::dsp

#endif  // EMOXFER_DSP_AUDIO_H_
