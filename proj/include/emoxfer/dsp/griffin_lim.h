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

#ifndef EMOXFER_DSP_GRIFFIN_LIM_H_
#define EMOXFER_DSP_GRIFFIN_LIM_H_

#include <cstdint>

#include "emoxfer/dsp/audio.h"
#include "emoxfer/dsp/mel.h"

namespace emoxfer::dsp {

struct GriffinLimConfig {
  int iterations = 60;
  uint64_t seed = 0;
};

// Approximate linear magnitude [frames x bins] from a log-mel spectrogram
// via the filterbank pseudo-inverse, clamped at zero.
Mat MelToMagnitude(const Mat& log_mel, const MelConfig& cfg = {});

// Audio preview from a log-mel spectrogram; phase starts random (seeded)
// and is refined by alternating projections. Output length is
// (frames - 1) * shift + frame_length samples.
AudioClip GriffinLimPreview(const Mat& log_mel, const GriffinLimConfig& gl = {},
                            const MelConfig& cfg = {});

}  // namespace emoxfer::dsp

#endif  // EMOXFER_DSP_GRIFFIN_LIM_H_
