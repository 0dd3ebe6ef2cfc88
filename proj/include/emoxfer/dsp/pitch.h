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

#ifndef EMOXFER_DSP_PITCH_H_
#define EMOXFER_DSP_PITCH_H_

#include <vector>

#include "emoxfer/dsp/audio.h"
#include "emoxfer/dsp/stft.h"

namespace emoxfer::dsp {

struct PitchConfig {
  FrameConfig frame;
  double min_f0 = 60.0;
  double max_f0 = 500.0;
  // Frames whose best normalized autocorrelation falls below this are
  // unvoiced.
  double voicing_threshold = 0.3;
  // Among candidate peaks, the shortest lag reaching this fraction of the
  // best peak wins (guards against period doubling).
  double octave_ratio = 0.9;
};

// Per-frame F0 in Hz from the normalized autocorrelation of each frame,
// refined by parabolic interpolation. 0 marks an unvoiced frame.
std::vector<double> ExtractF0(const AudioClip& clip, const PitchConfig& cfg = {});

inline constexpr double kEnergyFloorDb = -80.0;

// Per-frame RMS energy in dB (20 log10 rms), floored at -80 dB.
std::vector<double> ExtractEnergy(const AudioClip& clip, const FrameConfig& cfg = {});

// Frame-level acoustic correlates of pitch and intensity.
struct FrameProsody {
  std::vector<double> f0_hz;
  std::vector<double> energy_db;
};

FrameProsody ExtractFrameProsody(const AudioClip& clip, const PitchConfig& cfg = {});

}  // namespace emoxfer::dsp

#endif  // EMOXFER_DSP_PITCH_H_
