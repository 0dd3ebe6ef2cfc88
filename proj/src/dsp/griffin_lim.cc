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

#include "emoxfer/dsp/griffin_lim.h"

#include <cmath>
#include <algorithm>
#include <complex>
#include <numbers>

#include <Eigen/QR>

#include "emoxfer/core/error.h"
#include "emoxfer/core/rng.h"

namespace emoxfer::dsp {

Mat MelToMagnitude(const Mat& log_mel, const MelConfig& cfg) {
  if (log_mel.cols() != kNumMelBands) throw ShapeError("mel must have 80 bands");
  const Mat fb = MelFilterbank(cfg);  // [80 x bins]
  const Mat pinv = fb.completeOrthogonalDecomposition().pseudoInverse();  // [bins x 80]
  const Mat mel_amp = log_mel.array().exp().matrix();
  Mat mag = mel_amp * pinv.transpose();
  return mag.cwiseMax(0.0);
}

AudioClip GriffinLimPreview(const Mat& log_mel, const GriffinLimConfig& gl,
                            const MelConfig& cfg) {
  if (gl.iterations < 0) throw ParameterError("iterations must be non-negative");
  const FrameConfig& fc = cfg.frame;
  const Mat mag = MelToMagnitude(log_mel, cfg);
  const int frames = static_cast<int>(mag.rows());
  const int bins = fc.NumBins();
  if (frames == 0) throw ShortInputError("empty mel spectrogram");

  Rng rng(gl.seed);
  using Spec = std::vector<std::vector<std::complex<double>>>;
  Spec spec(static_cast<size_t>(frames), std::vector<std::complex<double>>(static_cast<size_t>(bins)));
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < bins; ++k) {
      const double phase = 2.0 * std::numbers::pi * rng.UniformOpen();
      spec[t][k] = std::polar(mag(t, k), phase);
    }
  }

  std::vector<double> signal = Istft(spec, fc);
  for (int it = 0; it < gl.iterations; ++it) {
    AudioClip clip{signal, fc.sample_rate};
    const Spec est = Stft(clip, fc);
    for (int t = 0; t < frames; ++t) {
      for (int k = 0; k < bins; ++k) {
        const double a = std::abs(est[t][k]);
        spec[t][k] = a > 1e-12 ? est[t][k] * (mag(t, k) / a) : std::complex<double>(mag(t, k), 0.0);
      }
    }
    signal = Istft(spec, fc);
  }
  for (double& s : signal) s = std::clamp(s, -1.0, 1.0);
  return AudioClip{std::move(signal), fc.sample_rate};
}

}  // namespace emoxfer::dsp
