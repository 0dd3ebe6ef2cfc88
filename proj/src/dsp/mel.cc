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

#include "emoxfer/dsp/mel.h"

#include <cmath>

#include "emoxfer/core/error.h"

namespace emoxfer::dsp {

double MelConfig::LogFloor() const { return std::log(amplitude_floor); }

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Vec MelCenterFrequencies(const MelConfig& cfg) {
  const double lo = HzToMel(cfg.fmin);
  const double hi = HzToMel(cfg.fmax);
  Vec centers(kNumMelBands);
  for (int m = 0; m < kNumMelBands; ++m) {
    centers(m) = MelToHz(lo + (hi - lo) * (m + 1) / (kNumMelBands + 1));
  }
  return centers;
}

Mat MelFilterbank(const MelConfig& cfg) {
  const int bins = cfg.frame.NumBins();
  const double lo = HzToMel(cfg.fmin);
  const double hi = HzToMel(cfg.fmax);
  std::vector<double> edges(kNumMelBands + 2);
  for (int i = 0; i < kNumMelBands + 2; ++i) {
    edges[static_cast<size_t>(i)] = MelToHz(lo + (hi - lo) * i / (kNumMelBands + 1));
  }
  Mat fb = Mat::Zero(kNumMelBands, bins);
  for (int m = 0; m < kNumMelBands; ++m) {
    const double left = edges[static_cast<size_t>(m)];
    const double center = edges[static_cast<size_t>(m) + 1];
    const double right = edges[static_cast<size_t>(m) + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * cfg.frame.sample_rate / cfg.frame.n_fft;
      if (f > left && f < right) {
        fb(m, k) = f <= center ? (f - left) / (center - left) : (right - f) / (right - center);
      }
    }
  }
  return fb;
}

Mat MagnitudeToLogMel(const Mat& magnitude, const MelConfig& cfg) {
  if (magnitude.cols() != cfg.frame.NumBins()) throw ShapeError("magnitude has wrong bin count");
  Mat mel = magnitude * MelFilterbank(cfg).transpose();
  for (Eigen::Index i = 0; i < mel.size(); ++i) {
    mel.data()[i] = std::log(std::max(cfg.amplitude_floor, mel.data()[i]));
  }
  return mel;
}

MelSpectrogram ComputeMel(const AudioClip& clip, const MelConfig& cfg) {
  if (clip.samples.empty()) throw ShortInputError("empty clip");
  MelSpectrogram out;
  out.values = MagnitudeToLogMel(StftMagnitude(clip, cfg.frame), cfg);
  out.frame_shift_ms = cfg.frame.FrameShiftMs();
  out.frame_length_ms = cfg.frame.FrameLengthMs();
  return out;
}

}  // namespace emoxfer::dsp
