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

#ifndef EMOXFER_DSP_MEL_H_
#define EMOXFER_DSP_MEL_H_

#include "emoxfer/core/tensor.h"
#include "emoxfer/dsp/audio.h"
#include "emoxfer/dsp/stft.h"

namespace emoxfer::dsp {

inline constexpr int kNumMelBands = 80;

struct MelConfig {
  FrameConfig frame;
  double fmin = 0.0;
  double fmax = kSampleRate / 2.0;
  // Magnitude floor applied before the log.
  double amplitude_floor = 1e-5;

  double LogFloor() const;
};

// Log-amplitude mel spectrogram, [frames x 80].
struct MelSpectrogram {
  Mat values;
  double frame_shift_ms = 12.5;
  double frame_length_ms = 50.0;

  int frames() const { return static_cast<int>(values.rows()); }
};

double HzToMel(double hz);
double MelToHz(double mel);

// Triangular filters with unit peak, [80 x bins]. Centres are equally
// spaced on the mel scale between fmin and fmax.
Mat MelFilterbank(const MelConfig& cfg);
// Centre frequency in Hz of each band.
Vec MelCenterFrequencies(const MelConfig& cfg);

// log(max(floor, filterbank * |STFT|)). Throws ShortInputError for clips
// shorter than one frame and DataError for non-finite samples.
MelSpectrogram ComputeMel(const AudioClip& clip, const MelConfig& cfg = {});

// Maps linear STFT magnitudes [frames x bins] through the filterbank.
Mat MagnitudeToLogMel(const Mat& magnitude, const MelConfig& cfg);

}  // namespace emoxfer::dsp

#endif  // EMOXFER_DSP_MEL_H_
